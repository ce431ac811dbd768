//! Numerical experiments: projection norms, the exact L^p_x L²_t identity,
//! the Wainger probe, Strichartz ratios and the sharpness probe.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::fit::{fit_against, ExponentFit};
use crate::error::{Error, Result};
use crate::hermite::{eigenvalue, enumerate_eigenspace, hermite_value, GridSpec, MultiIndex};
use crate::propagator::{default_time_points, evolve_space_time, TimeSynth};
use crate::spaces::{evolution_mixed_norm, mixed_norm, sobolev_norm, time_norm, triebel_norm, MixedNormSpec, NormOrder};
use crate::spectral::SpectralField;
use crate::sum;

/// Grid and time-grid overrides shared by the experiments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Numerics {
    /// Points per dimension; default sizing when absent.
    pub grid_n: Option<usize>,
    /// Multiplier on the default box half-width.
    pub box_scale: f64,
    /// Explicit box half-width L, overriding the default and `box_scale`.
    pub half_width: Option<f64>,
    /// Number of time samples on (−π, π).
    pub time_points: Option<usize>,
}

impl Default for Numerics {
    fn default() -> Self {
        Self {
            grid_n: None,
            box_scale: 1.0,
            half_width: None,
            time_points: None,
        }
    }
}

impl Numerics {
    /// Spatial grid for fields truncated at `cutoff`.
    pub fn grid_for(&self, cutoff: usize, dim: usize) -> GridSpec {
        let mut grid = GridSpec::for_cutoff_scaled(cutoff, dim, self.box_scale);
        if let Some(l) = self.half_width {
            let step = grid.step();
            grid.half_width = l;
            grid.points_per_dim = GridSpec::odd_count(l, step);
        }
        if let Some(n) = self.grid_n {
            grid.points_per_dim = n;
        }
        if let Some(nt) = self.time_points {
            grid.time_points = nt;
        }
        grid
    }
}

/// Unit-L² field with iid standard complex Gaussian coefficients drawn from
/// ChaCha8 seeded with `seed`, in graded-lex order (real part, then imaginary).
pub fn random_band_limited(cutoff: usize, dim: usize, seed: u64) -> Result<SpectralField> {
    let mut field = SpectralField::new(dim, cutoff)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for c in field.coeffs_mut() {
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        *c = Complex64::new(re, im);
    }
    let norm = field.l2_norm();
    field.scale(Complex64::new(1.0 / norm, 0.0));
    Ok(field)
}

/// Grid wide and fine enough to resolve h_k.
pub fn eigenfunction_grid(k: usize) -> GridSpec {
    GridSpec::for_cutoff(k, 1)
}

/// ‖h_k‖_{L^p(ℝ)}; equals ‖P_k‖_{L²→L^p} in one dimension.
///
/// Finite p integrates |h_k|^p on a subdivided copy of `grid`. For p = ∞ the
/// grid maximum is refined by golden-section search between the neighbouring
/// grid points.
pub fn projection_norm_1d(k: usize, p: f64, grid: &GridSpec) -> Result<f64> {
    if grid.dim != 1 {
        return Err(Error::DimensionMismatch { expected: 1, got: grid.dim });
    }
    if !(p >= 1.0) {
        return Err(Error::InvalidParameter(format!("exponent p = {p} out of range")));
    }
    grid.validate()?;
    let turning = ((2 * k + 1) as f64).sqrt();
    if turning >= grid.half_width {
        return Err(Error::GridTooSmall(format!(
            "turning point {turning:.3} of h_{k} lies outside the box [-{0}, {0}]",
            grid.half_width
        )));
    }
    if grid.step() >= PI / turning {
        return Err(Error::GridTooSmall(format!(
            "step {:.4} does not resolve the oscillation of h_{k}",
            grid.step()
        )));
    }
    if p.is_finite() {
        let fine = GridSpec {
            points_per_dim: (grid.points_per_dim - 1) * refinement(p) + 1,
            ..*grid
        };
        let w = fine.axis_weights();
        let values: Vec<f64> = fine.axis().par_iter().map(|&x| hermite_value(k, x).abs().powf(p)).collect();
        return Ok(sum::sum(values.iter().zip(&w).map(|(v, w)| w * v)).powf(1.0 / p));
    }
    let axis = grid.axis();
    let values: Vec<f64> = axis.par_iter().map(|&x| hermite_value(k, x).abs()).collect();
    let (best, &grid_max) = values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .ok_or(Error::Empty("grid"))?;
    let lo = axis[best.saturating_sub(1)];
    let hi = axis[(best + 1).min(axis.len() - 1)];
    Ok(grid_max.max(golden_max(|x| hermite_value(k, x).abs(), lo, hi)))
}

/// Subdivision of the grid step for |h_k|^p: an even integer p multiplies
/// the bandwidth by p/2, any other p leaves kinks at the zeros of h_k where
/// the trapezoid rule converges only algebraically.
fn refinement(p: f64) -> usize {
    if p == 2.0 {
        1
    } else if p.fract() == 0.0 && p % 2.0 == 0.0 && p <= 32.0 {
        p as usize / 2 + 1
    } else {
        16
    }
}

fn golden_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> f64 {
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..80 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = f(d);
        }
    }
    fc.max(fd)
}

/// Both sides of ‖u‖_{L^p_x(L²_t)} = √(2π)‖f‖_{F⁰_{p,2}}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub relative_error: f64,
}

/// Left side from the evolved space-time samples and a mixed norm, right side
/// from the Triebel–Lizorkin norm with r = 0, q = 2.
pub fn lemma1_identity_check(field: &SpectralField, p: f64, grid: &GridSpec) -> Result<IdentityCheck> {
    let needed = 4 * field.cutoff() + 4;
    if grid.time_points < needed {
        return Err(Error::InvalidParameter(format!(
            "time grid has {} points, needs at least {needed}",
            grid.time_points
        )));
    }
    let u = evolve_space_time(field, grid, grid.time_points)?;
    let lhs = mixed_norm(&u, MixedNormSpec::new(p, 2.0, NormOrder::XThenT)?)?;
    let rhs = (2.0 * PI).sqrt() * triebel_norm(field, 0.0, p, 2.0, grid)?;
    Ok(IdentityCheck {
        lhs,
        rhs,
        relative_error: (lhs - rhs).abs() / rhs,
    })
}

/// Ratio ‖Σ λ_k^{-s_q} a_k e^{iλ_k t}‖_{L^q(−π,π)} / ‖a‖_{ℓ²}, s_q = 1/2 − 1/q.
pub fn wainger_ratio(a: &[Complex64], q: f64, dim: usize) -> Result<f64> {
    if !(q >= 2.0 && q.is_finite()) {
        return Err(Error::InvalidParameter(format!("Wainger probe needs q in [2, inf), got {q}")));
    }
    if a.is_empty() {
        return Err(Error::Empty("coefficient vector"));
    }
    let norm = sum::sum(a.iter().map(|c| c.norm_sqr())).sqrt();
    if norm == 0.0 {
        return Err(Error::ZeroData);
    }
    let s_q = 0.5 - 1.0 / q;
    let kk = a.len() - 1;
    let shells: Vec<Complex64> = a
        .iter()
        .enumerate()
        .map(|(k, c)| c * (eigenvalue(k as u64, dim as u64) as f64).powf(-s_q))
        .collect();
    let n_t = 8 * kk + 16;
    let synth = TimeSynth::new(dim, 0, kk, n_t);
    let mut series = vec![Complex64::new(0.0, 0.0); n_t];
    synth.eval(&shells, &mut series, &mut Vec::new());
    Ok(time_norm(&series, q) / norm)
}

/// Largest Wainger ratio over `trials` vectors: `profile` itself, then
/// `profile` multiplied entrywise by iid standard complex Gaussians.
pub fn wainger_probe(profile: &[Complex64], q: f64, trials: usize, seed: u64, dim: usize) -> Result<f64> {
    if trials == 0 {
        return Err(Error::InvalidParameter("Wainger probe needs at least one trial".into()));
    }
    let vectors: Vec<Vec<Complex64>> = (0..trials)
        .map(|i| {
            if i == 0 {
                return profile.to_vec();
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i as u64));
            profile
                .iter()
                .map(|a| {
                    let re: f64 = StandardNormal.sample(&mut rng);
                    let im: f64 = StandardNormal.sample(&mut rng);
                    a * Complex64::new(re, im)
                })
                .collect()
        })
        .collect();
    let ratios = vectors
        .par_iter()
        .map(|v| wainger_ratio(v, q, dim))
        .collect::<Result<Vec<f64>>>()?;
    Ok(ratios.into_iter().fold(0.0, f64::max))
}

/// ‖e^{itH} f‖_{L^p_x(L^q_t)} / ‖f‖_{W^s}.
pub fn strichartz_ratio(field: &SpectralField, p: f64, q: f64, s: f64, numerics: &Numerics) -> Result<f64> {
    if field.is_zero() {
        return Err(Error::ZeroData);
    }
    let grid = numerics.grid_for(field.cutoff(), field.dim());
    let time_points = numerics.time_points.unwrap_or_else(|| default_time_points(field));
    let lhs = evolution_mixed_norm(field, &grid, time_points, p, q)?;
    Ok(lhs / sobolev_norm(field, s))
}

/// Strichartz ratios over k and their growth exponent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SharpnessOutcome {
    pub fit: ExponentFit,
    pub ratios: Vec<(u64, f64)>,
}

/// Data f = P_k g: h_k in one dimension, a seeded random vector of the k-th
/// eigenspace otherwise. The growth exponent is fitted against λ_k = 2k + d.
pub fn sharpness_probe(
    k_values: &[u64],
    p: f64,
    q: f64,
    s: f64,
    dim: usize,
    seed: u64,
    numerics: &Numerics,
) -> Result<SharpnessOutcome> {
    if k_values.is_empty() {
        return Err(Error::Empty("k range"));
    }
    let ratios = k_values
        .iter()
        .map(|&k| {
            let ku = k as usize;
            let field = if dim == 1 {
                SpectralField::basis(1, ku, &MultiIndex::new(vec![k as u32]))?
            } else {
                let mut f = SpectralField::new(dim, ku)?;
                let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(k));
                for mu in enumerate_eigenspace(ku, dim) {
                    let re: f64 = StandardNormal.sample(&mut rng);
                    let im: f64 = StandardNormal.sample(&mut rng);
                    f.set(&mu, Complex64::new(re, im))?;
                }
                let n = f.l2_norm();
                f.scale(Complex64::new(1.0 / n, 0.0));
                f
            };
            Ok((k, strichartz_ratio(&field, p, q, s, numerics)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let lambdas: Vec<f64> = k_values
        .iter()
        .map(|&k| eigenvalue(k, dim as u64) as f64)
        .collect();
    let fit = fit_against(&ratios, &lambdas)?;
    Ok(SharpnessOutcome { fit, ratios })
}
