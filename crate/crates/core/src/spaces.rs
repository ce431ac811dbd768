//! L^p norms, mixed space-time norms, and the Triebel–Lizorkin and
//! Hermite–Sobolev norms built on the projections P_k.
//!
//! Both F^r_{p,q} and W^s weight the k-th projection by λ_k = 2k + d rather
//! than by k, so the k = 0 term is well defined and W^s = F^s_{2,2} holds as
//! an identity.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hermite::{eigenvalue, time_grid, GridSpec};
use crate::propagator::{active_range, TimeSynth};
use crate::spectral::{GridBasis, SampledField, SpectralField};
use crate::sum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormOrder {
    /// L^p_x(L^q_t): time norm inside, space norm outside.
    XThenT,
    /// L^q_t(L^p_x): space norm inside, time norm outside.
    TThenX,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixedNormSpec {
    pub p: f64,
    pub q: f64,
    pub order: NormOrder,
}

impl MixedNormSpec {
    pub fn new(p: f64, q: f64, order: NormOrder) -> Result<Self> {
        if !(p >= 1.0) {
            return Err(Error::InvalidParameter(format!("mixed norm needs p >= 1, got {p}")));
        }
        if !(q >= 1.0 && q.is_finite()) {
            return Err(Error::InvalidParameter(format!("mixed norm needs 1 <= q < inf, got {q}")));
        }
        Ok(Self { p, q, order })
    }
}

/// Samples u(t_j, x) on a spatial grid times N_t midpoints of (−π, π);
/// `values[j * num_points + p]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimeSamples {
    pub grid: GridSpec,
    pub times: Vec<f64>,
    pub values: Vec<Complex64>,
}

impl SpaceTimeSamples {
    pub fn new(grid: GridSpec, values: Vec<Complex64>) -> Result<Self> {
        grid.validate()?;
        let expected = grid.num_points() * grid.time_points;
        if values.len() != expected {
            return Err(Error::InvalidParameter(format!(
                "space-time sample count {} does not match {} points x {} times",
                values.len(),
                grid.num_points(),
                grid.time_points
            )));
        }
        Ok(Self {
            times: time_grid(grid.time_points),
            grid,
            values,
        })
    }

    pub fn from_fn<F>(grid: GridSpec, f: F) -> Result<Self>
    where
        F: Fn(f64, &[f64]) -> Complex64 + Sync,
    {
        grid.validate()?;
        let points = crate::hermite::make_grid(&grid);
        let times = time_grid(grid.time_points);
        let values = times
            .iter()
            .flat_map(|&t| points.iter().map(move |x| (t, x)))
            .collect::<Vec<_>>()
            .into_par_iter()
            .map(|(t, x)| f(t, x))
            .collect();
        Self::new(grid, values)
    }

    pub fn time_step(&self) -> f64 {
        2.0 * PI / self.grid.time_points as f64
    }

    /// Time series at spatial point `p`.
    pub fn series(&self, p: usize) -> Vec<Complex64> {
        let np = self.grid.num_points();
        (0..self.grid.time_points).map(|j| self.values[j * np + p]).collect()
    }

    /// Spatial slice at time index `j`.
    pub fn slice(&self, j: usize) -> &[Complex64] {
        let np = self.grid.num_points();
        &self.values[j * np..(j + 1) * np]
    }
}

/// (Σ w_i a_i^p)^{1/p} for non-negative a_i, or max a_i when p = ∞.
fn weighted_lp(values: impl Iterator<Item = f64>, weights: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        values.fold(0.0, f64::max)
    } else {
        sum::sum(values.zip(weights).map(|(a, w)| w * a.powf(p))).powf(1.0 / p)
    }
}

/// Periodic-trapezoid L^q(−π, π) norm of a uniformly sampled time series.
pub fn time_norm(series: &[Complex64], q: f64) -> f64 {
    if q.is_infinite() {
        return series.iter().map(|v| v.norm()).fold(0.0, f64::max);
    }
    let dt = 2.0 * PI / series.len() as f64;
    (dt * sum::sum(series.iter().map(|v| v.norm().powf(q)))).powf(1.0 / q)
}

fn check_p(p: f64, lower_open: bool) -> Result<()> {
    let ok = if lower_open { p > 0.0 } else { p >= 1.0 };
    if !ok || p.is_nan() {
        return Err(Error::InvalidParameter(format!("exponent p = {p} out of range")));
    }
    Ok(())
}

/// (∫|f|^p)^{1/p} by tensor trapezoid on the box; grid maximum for p = ∞.
pub fn lp_norm(f: &SampledField, p: f64) -> Result<f64> {
    check_p(p, false)?;
    if f.values.is_empty() {
        return Err(Error::Empty("grid"));
    }
    let w = f.grid.weights();
    Ok(weighted_lp(f.values.iter().map(|v| v.norm()), &w, p))
}

/// Inner norm then outer norm in the order of `spec`.
pub fn mixed_norm(u: &SpaceTimeSamples, spec: MixedNormSpec) -> Result<f64> {
    let np = u.grid.num_points();
    let nt = u.grid.time_points;
    match spec.order {
        NormOrder::XThenT => {
            let inner: Vec<f64> = (0..np)
                .into_par_iter()
                .map(|p| time_norm(&u.series(p), spec.q))
                .collect();
            Ok(weighted_lp(inner.into_iter(), &u.grid.weights(), spec.p))
        }
        NormOrder::TThenX => {
            let w = u.grid.weights();
            let inner: Vec<f64> = (0..nt)
                .into_par_iter()
                .map(|j| weighted_lp(u.slice(j).iter().map(|v| v.norm()), &w, spec.p))
                .collect();
            let dt = 2.0 * PI / nt as f64;
            Ok((dt * sum::sum(inner.iter().map(|v| v.powf(spec.q)))).powf(1.0 / spec.q))
        }
    }
}

/// ‖e^{itH} f‖_{L^p_x(L^q_t)} evaluated point by point without storing the
/// space-time array. As everywhere on grids, p = ∞ means the maximum over grid
/// points, which can fall short of the true supremum by O(step²).
pub fn evolution_mixed_norm(field: &SpectralField, grid: &GridSpec, time_points: usize, p: f64, q: f64) -> Result<f64> {
    check_p(p, false)?;
    if !(q >= 1.0) {
        return Err(Error::InvalidParameter(format!("time exponent q = {q} out of range")));
    }
    if field.dim() != grid.dim {
        return Err(Error::DimensionMismatch {
            expected: field.dim(),
            got: grid.dim,
        });
    }
    if time_points == 0 {
        return Err(Error::InvalidParameter("time grid needs at least 1 point".into()));
    }
    let (lo, hi) = active_range(field)?;
    let synth = TimeSynth::new(field.dim(), lo, hi, time_points);
    let basis = GridBasis::new(*grid, field.cutoff());
    let kk = field.cutoff() + 1;
    let inner: Vec<f64> = (0..grid.num_points())
        .into_par_iter()
        .map_init(
            || {
                (
                    vec![0usize; grid.dim],
                    vec![Complex64::new(0.0, 0.0); kk],
                    vec![Complex64::new(0.0, 0.0); synth.n_t()],
                    Vec::new(),
                )
            },
            |(idx, shells, series, scratch), pt| {
                grid.unravel(pt, idx);
                basis.shell_values(field, idx, shells);
                synth.eval(shells, series, scratch);
                time_norm(series, q)
            },
        )
        .collect();
    Ok(weighted_lp(inner.into_iter(), &grid.weights(), p))
}

/// ‖(Σ_k λ_k^{rq} |P_k f|^q)^{1/q}‖_{L^p} on the grid, λ_k = 2k + d; q = ∞ is
/// the supremum over k and p = ∞ the grid maximum.
pub fn triebel_norm(field: &SpectralField, r: f64, p: f64, q: f64, grid: &GridSpec) -> Result<f64> {
    check_p(p, true)?;
    if !(q > 0.0) {
        return Err(Error::InvalidParameter(format!("exponent q = {q} out of range")));
    }
    if field.dim() != grid.dim {
        return Err(Error::DimensionMismatch {
            expected: field.dim(),
            got: grid.dim,
        });
    }
    let d = field.dim() as u64;
    let kk = field.cutoff() + 1;
    let weights: Vec<f64> = (0..kk)
        .map(|k| (eigenvalue(k as u64, d) as f64).powf(r))
        .collect();
    let basis = GridBasis::new(*grid, field.cutoff());
    let inner: Vec<f64> = (0..grid.num_points())
        .into_par_iter()
        .map_init(
            || (vec![0usize; grid.dim], vec![Complex64::new(0.0, 0.0); kk]),
            |(idx, shells), pt| {
                grid.unravel(pt, idx);
                basis.shell_values(field, idx, shells);
                let terms = shells.iter().zip(&weights).map(|(v, w)| w * v.norm());
                if q.is_infinite() {
                    terms.fold(0.0, f64::max)
                } else {
                    sum::sum(terms.map(|a| a.powf(q))).powf(1.0 / q)
                }
            },
        )
        .collect();
    Ok(weighted_lp(inner.into_iter(), &grid.weights(), p))
}

/// (Σ_k λ_k^{2s} ‖P_k f‖²)^{1/2} in coefficient space.
pub fn sobolev_norm(field: &SpectralField, s: f64) -> f64 {
    let d = field.dim() as u64;
    sum::sum((0..=field.cutoff()).map(|k| {
        let lam = eigenvalue(k as u64, d) as f64;
        lam.powf(2.0 * s) * field.shell_norm_sqr(k)
    }))
    .sqrt()
}
