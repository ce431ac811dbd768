//! The Schrödinger group e^{itH}, by eigen-expansion and by the Mehler
//! oscillatory kernel, with the global phase between the two calibrated
//! numerically.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hermite::{eigenvalue, time_grid, GridSpec, MultiIndex};
use crate::spaces::SpaceTimeSamples;
use crate::spectral::{shell_samples, synthesize, SampledField, SpectralField};
use crate::sum::{self, ComplexNeumaier};

/// Kernel path refuses times with |sin 2t| below this.
pub const SINGULAR_THRESHOLD: f64 = 1e-3;

/// Acceptable relative mismatch between the calibrated kernel path and the
/// eigen path on the low-order basis.
pub const CALIBRATION_TOLERANCE: f64 = 1e-6;

/// Boundary magnitude above which kernel-path input is reported as not decayed.
pub const BOUNDARY_DECAY: f64 = 1e-10;

pub const BRANCH_RULE: &str =
    "principal branch of (-i sin 2t)^(-d/2); remaining global phase measured against the eigen path";

/// Global phase relating the literal kernel to the eigen-expansion at one (t, d).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseConvention {
    pub t: f64,
    pub dim: usize,
    pub global_phase: Complex64,
    pub branch_rule: String,
    /// Worst relative L² mismatch over the calibration basis after applying the phase.
    pub residual: f64,
}

fn phase(angle: f64) -> Complex64 {
    Complex64::from_polar(1.0, angle)
}

/// c_μ ← e^{i(2|μ|+d)t} c_μ.
pub fn evolve_eigen(field: &SpectralField, t: f64) -> SpectralField {
    let mut out = field.clone();
    let d = field.dim() as u64;
    for k in 0..=field.cutoff() {
        let rot = phase(eigenvalue(k as u64, d) as f64 * t);
        let range = field.table().shell_range(k);
        for c in &mut out.coeffs_mut()[range] {
            *c *= rot;
        }
    }
    out
}

fn check_time(t: f64) -> Result<f64> {
    let s = (2.0 * t).sin();
    if !t.is_finite() || s.abs() < SINGULAR_THRESHOLD {
        return Err(Error::SingularTime {
            t,
            sin2t: s.abs(),
            threshold: SINGULAR_THRESHOLD,
        });
    }
    Ok(s)
}

/// (2π)^{-d/2} (−i sin 2t)^{-d/2}, principal branch.
fn kernel_prefactor(sin2t: f64, d: usize) -> Complex64 {
    let half_d = 0.5 * d as f64;
    Complex64::new(0.0, -sin2t).powf(-half_d) * (2.0 * PI).powf(-half_d)
}

/// K_it(x, y) = (2π)^{-d/2}(−i sin 2t)^{-d/2} exp(−(i/2)(cot 2t (|x|²+|y|²) − 2x·y / sin 2t)).
pub fn mehler_kernel(t: f64, x: &[f64], y: &[f64]) -> Result<Complex64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            got: y.len(),
        });
    }
    let s = check_time(t)?;
    let cot = (2.0 * t).cos() / s;
    let norm_sq = sum::sum(x.iter().chain(y).map(|v| v * v));
    let dot = sum::sum(x.iter().zip(y).map(|(a, b)| a * b));
    let angle = -0.5 * (cot * norm_sq - 2.0 * dot / s);
    Ok(kernel_prefactor(s, x.len()) * phase(angle))
}

/// Phase predicted by continuing Mehler's formula to ω = e^{2it}: the kernel of
/// e^{itH} is e^{idt}·π^{-d/2}(1−e^{4it})^{-d/2}·exp(…), compared here with the
/// literal prefactor. Used only as a cross-check of [`calibrate_phase`].
pub fn continued_phase(t: f64, d: usize) -> Result<Complex64> {
    let s = check_time(t)?;
    let half_d = 0.5 * d as f64;
    let one_minus = Complex64::new(1.0, 0.0) - phase(4.0 * t);
    let continued = one_minus.powf(-half_d) * PI.powf(-half_d) * phase(d as f64 * t);
    let ratio = continued / kernel_prefactor(s, d);
    Ok(ratio / ratio.norm())
}

/// Grid for the kernel path: default box for `cutoff`, spacing giving
/// `points_per_wavelength` samples of the fastest local oscillation of the
/// integrand in y.
pub fn kernel_grid(t: f64, cutoff: usize, dim: usize, points_per_wavelength: f64) -> Result<GridSpec> {
    let s = check_time(t)?;
    let base = GridSpec::for_cutoff(cutoff, dim);
    let bandwidth = ((2 * cutoff + dim) as f64).sqrt() + 3.0;
    let max_freq = base.half_width * (1.0 + (2.0 * t).cos().abs()) / s.abs() + bandwidth;
    let step = 2.0 * PI / (points_per_wavelength * max_freq);
    Ok(GridSpec {
        points_per_dim: GridSpec::odd_count(base.half_width, step),
        ..base
    })
}

/// Applies the literal kernel by tensor trapezoid, one axis at a time.
fn apply_raw_kernel(values: &[Complex64], grid: &GridSpec, t: f64) -> Result<Vec<Complex64>> {
    let s = check_time(t)?;
    let cot = (2.0 * t).cos() / s;
    let axis = grid.axis();
    let w = grid.axis_weights();
    let n = grid.points_per_dim;
    let matrix: Vec<Complex64> = (0..n * n)
        .into_par_iter()
        .map(|ij| {
            let (i, j) = (ij / n, ij % n);
            let (x, y) = (axis[i], axis[j]);
            w[j] * phase(-0.5 * (cot * (x * x + y * y) - 2.0 * x * y / s))
        })
        .collect();

    let mut current = values.to_vec();
    for a in 0..grid.dim {
        let inner = n.pow((grid.dim - 1 - a) as u32);
        let src = &current;
        let next: Vec<Complex64> = (0..current.len())
            .into_par_iter()
            .map(|p| {
                let inn = p % inner;
                let i = (p / inner) % n;
                let outer = p / (inner * n);
                let base = outer * n * inner + inn;
                let row = &matrix[i * n..(i + 1) * n];
                let mut acc = ComplexNeumaier::new();
                for (j, m) in row.iter().enumerate() {
                    acc.add(m * src[base + j * inner]);
                }
                acc.value()
            })
            .collect();
        current = next;
    }
    let pref = kernel_prefactor(s, grid.dim);
    for v in &mut current {
        *v *= pref;
    }
    Ok(current)
}

fn weighted_inner(a: &[Complex64], b: &[Complex64], w: &[f64]) -> Complex64 {
    sum::sum_complex(a.iter().zip(b).zip(w).map(|((x, y), w)| x.conj() * y * *w))
}

/// Measures the unit factor φ(t, d) with φ·(kernel path) = eigen path on the
/// tensor basis Φ_μ, μ ∈ {0, 1, 2}^d.
pub fn calibrate_phase(t: f64, dim: usize) -> Result<PhaseConvention> {
    check_time(t)?;
    let cutoff = 2 * dim;
    let grid = kernel_grid(t, cutoff, dim, 10.0)?;
    let weights = grid.weights();

    let mut basis = Vec::new();
    let mut mu = vec![0u32; dim];
    loop {
        basis.push(MultiIndex::new(mu.clone()));
        let Some(pos) = mu.iter().position(|&m| m < 2) else { break };
        for m in &mut mu[..pos] {
            *m = 0;
        }
        mu[pos] += 1;
    }

    let mut pairs = Vec::with_capacity(basis.len());
    let mut overlap = ComplexNeumaier::new();
    for mu in &basis {
        let field = SpectralField::basis(dim, cutoff, mu)?;
        let input = synthesize(&field, &grid)?;
        let raw = apply_raw_kernel(&input.values, &grid, t)?;
        let reference = synthesize(&evolve_eigen(&field, t), &grid)?.values;
        overlap.add(weighted_inner(&raw, &reference, &weights));
        pairs.push((raw, reference));
    }
    let overlap = overlap.value();
    if overlap.norm() == 0.0 || !overlap.norm().is_finite() {
        return Err(Error::CalibrationFailed {
            t,
            d: dim,
            residual: f64::INFINITY,
        });
    }
    let global_phase = overlap / overlap.norm();
    let residual = pairs
        .iter()
        .map(|(raw, reference)| {
            let diff: Vec<Complex64> = raw.iter().zip(reference).map(|(r, e)| global_phase * r - e).collect();
            let num = weighted_inner(&diff, &diff, &weights).re.sqrt();
            let den = weighted_inner(reference, reference, &weights).re.sqrt();
            num / den
        })
        .fold(0.0, f64::max);
    if !(residual <= CALIBRATION_TOLERANCE) {
        return Err(Error::CalibrationFailed { t, d: dim, residual });
    }
    log::info!(
        "phase calibration t={t} d={dim} phase=({:.15e},{:.15e}) residual={residual:.3e}",
        global_phase.re,
        global_phase.im
    );
    Ok(PhaseConvention {
        t,
        dim,
        global_phase,
        branch_rule: BRANCH_RULE.to_string(),
        residual,
    })
}

/// Output of the kernel path.
#[derive(Debug, Clone)]
pub struct KernelEvolution {
    pub field: SampledField,
    pub phase: PhaseConvention,
    /// Largest input modulus on the box faces.
    pub boundary_magnitude: f64,
}

/// u(x) = φ·∫_box K_it(x, y) f(y) dy by tensor trapezoid on the sample grid.
pub fn evolve_kernel(f: &SampledField, t: f64) -> Result<KernelEvolution> {
    check_time(t)?;
    let phase = calibrate_phase(t, f.grid.dim)?;
    let boundary_magnitude = f.boundary_magnitude();
    if boundary_magnitude > BOUNDARY_DECAY {
        log::warn!(
            "kernel path input has not decayed at the box boundary: max |f| = {boundary_magnitude:.3e} > {BOUNDARY_DECAY:.0e}"
        );
    }
    let mut values = apply_raw_kernel(&f.values, &f.grid, t)?;
    for v in &mut values {
        *v *= phase.global_phase;
    }
    Ok(KernelEvolution {
        field: SampledField::new(f.grid, values)?,
        phase,
        boundary_magnitude,
    })
}

/// Evaluates Σ_k c_k e^{i(2k+d)t_j} on the midpoint time grid, by FFT when the
/// grid has an even number of points exceeding twice the shell span.
pub(crate) struct TimeSynth {
    k_lo: usize,
    span: usize,
    n_t: usize,
    fft: Option<(Arc<dyn Fft<f64>>, Vec<Complex64>)>,
    post: Vec<Complex64>,
    direct: Vec<Complex64>,
}

impl TimeSynth {
    pub fn new(dim: usize, k_lo: usize, k_hi: usize, n_t: usize) -> Self {
        let span = k_hi - k_lo;
        let times = time_grid(n_t);
        let half = n_t / 2;
        if n_t % 2 == 0 && half > span {
            let fft = FftPlanner::new().plan_fft_inverse(half);
            let pre = (0..=span).map(|m| phase(PI * m as f64 / half as f64)).collect();
            let lam = eigenvalue(k_lo as u64, dim as u64) as f64;
            let post = times.iter().map(|&t| phase(lam * t)).collect();
            Self {
                k_lo,
                span,
                n_t,
                fft: Some((fft, pre)),
                post,
                direct: Vec::new(),
            }
        } else {
            let direct = (k_lo..=k_hi)
                .flat_map(|k| {
                    let lam = eigenvalue(k as u64, dim as u64) as f64;
                    times.iter().map(move |&t| phase(lam * t)).collect::<Vec<_>>()
                })
                .collect();
            Self {
                k_lo,
                span,
                n_t,
                fft: None,
                post: Vec::new(),
                direct,
            }
        }
    }

    pub fn n_t(&self) -> usize {
        self.n_t
    }

    /// `shells[k]` holds (P_k f)(x) for k = 0..=K.
    pub fn eval(&self, shells: &[Complex64], out: &mut [Complex64], scratch: &mut Vec<Complex64>) {
        let active = &shells[self.k_lo..=self.k_lo + self.span];
        match &self.fft {
            Some((fft, pre)) => {
                let half = fft.len();
                scratch.clear();
                scratch.resize(half, Complex64::new(0.0, 0.0));
                for ((s, c), p) in scratch.iter_mut().zip(active).zip(pre) {
                    *s = c * p;
                }
                fft.process(scratch);
                for (j, (o, p)) in out.iter_mut().zip(&self.post).enumerate() {
                    *o = p * scratch[j % half];
                }
            }
            None => {
                for (j, o) in out.iter_mut().enumerate() {
                    let mut acc = ComplexNeumaier::new();
                    for (m, c) in active.iter().enumerate() {
                        acc.add(c * self.direct[m * self.n_t + j]);
                    }
                    *o = acc.value();
                }
            }
        }
    }
}

/// Shell range [lowest, highest] carrying non-zero coefficients.
pub(crate) fn active_range(field: &SpectralField) -> Result<(usize, usize)> {
    let shells = field.active_shells();
    match (shells.first(), shells.last()) {
        (Some(&lo), Some(&hi)) => Ok((lo, hi)),
        _ => Err(Error::ZeroData),
    }
}

/// Default number of time samples: 8·(spread of active shells) + 16.
pub fn default_time_points(field: &SpectralField) -> usize {
    match active_range(field) {
        Ok((lo, hi)) => 8 * (hi - lo) + 16,
        Err(_) => 16,
    }
}

/// u(t_j, x) = (e^{it_jH} f)(x) on the spatial grid times the midpoint time grid.
pub fn evolve_space_time(field: &SpectralField, grid: &GridSpec, time_points: usize) -> Result<SpaceTimeSamples> {
    if time_points == 0 {
        return Err(Error::InvalidParameter("time grid needs at least 1 point".into()));
    }
    let grid = GridSpec {
        time_points,
        ..*grid
    };
    let shells = shell_samples(field, &grid)?;
    let np = grid.num_points();
    let (lo, hi) = active_range(field).unwrap_or((0, 0));
    let synth = TimeSynth::new(field.dim(), lo, hi, time_points);
    let series: Vec<Vec<Complex64>> = shells
        .par_iter()
        .map_init(Vec::new, |scratch, sh| {
            let mut out = vec![Complex64::new(0.0, 0.0); time_points];
            synth.eval(sh, &mut out, scratch);
            out
        })
        .collect();
    let mut values = vec![Complex64::new(0.0, 0.0); np * time_points];
    for (p, s) in series.iter().enumerate() {
        for (j, v) in s.iter().enumerate() {
            values[j * np + p] = *v;
        }
    }
    SpaceTimeSamples::new(grid, values)
}
