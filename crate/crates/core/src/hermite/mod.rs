//! Normalized Hermite functions, their tensor products, and the grids and
//! quadrature rules used to sample them.
//!
//! The one-dimensional functions are evaluated with the normalized
//! three-term recurrence
//!
//! ```text
//! h_0(x) = π^{-1/4} e^{-x²/2}
//! h_k(x) = √(2/k) x h_{k-1}(x) − √((k-1)/k) h_{k-2}(x)
//! ```
//!
//! The Gaussian factor is carried as a separate logarithmic scale so that
//! large degrees do not lose it to underflow inside the oscillatory region.

mod grid;
mod multi_index;
mod quadrature;

pub use grid::{make_grid, time_grid, GridSpec};
pub use multi_index::{eigenspace_size, enumerate_eigenspace, MultiIndex};
pub use quadrature::{gauss_hermite_rule, QuadratureRule};

use crate::error::{Error, Result};

/// π^{-1/4}
pub const PI_POW_NEG_QUARTER: f64 = 0.751_125_544_464_942_5;

const RESCALE_ABOVE: f64 = 1e150;
const RESCALE_FACTOR: f64 = 1e-150;
// ln(1e150)
const RESCALE_LOG: f64 = 345.387_763_949_107_1;

/// Values h_0(x), …, h_{k_max}(x).
///
/// Deep in the classically forbidden region the values underflow to zero.
pub fn hermite_eval_1d(k_max: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(k_max + 1);
    hermite_eval_into(k_max, x, &mut out);
    out
}

/// Same as [`hermite_eval_1d`] but reuses the caller's buffer.
pub fn hermite_eval_into(k_max: usize, x: f64, out: &mut Vec<f64>) {
    out.clear();
    let mut log_scale = -0.5 * x * x;
    let mut factor = log_scale.exp();
    let mut prev = 0.0;
    let mut cur = PI_POW_NEG_QUARTER;
    out.push(cur * factor);
    for k in 1..=k_max {
        let kf = k as f64;
        let next = (2.0 / kf).sqrt() * x * cur - ((kf - 1.0) / kf).sqrt() * prev;
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE_ABOVE {
            cur *= RESCALE_FACTOR;
            prev *= RESCALE_FACTOR;
            log_scale += RESCALE_LOG;
            factor = log_scale.exp();
        }
        out.push(cur * factor);
    }
}

/// Scaled pair (ĥ_n, ĥ_{n-1}) with h = ĥ·e^{log_scale}; used where ratios or
/// logarithms are needed and the true values could underflow.
pub(crate) fn hermite_pair_scaled(n: usize, x: f64) -> (f64, f64, f64) {
    let mut log_scale = -0.5 * x * x;
    let mut prev = 0.0;
    let mut cur = PI_POW_NEG_QUARTER;
    for k in 1..=n {
        let kf = k as f64;
        let next = (2.0 / kf).sqrt() * x * cur - ((kf - 1.0) / kf).sqrt() * prev;
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE_ABOVE {
            cur *= RESCALE_FACTOR;
            prev *= RESCALE_FACTOR;
            log_scale += RESCALE_LOG;
        }
    }
    (cur, prev, log_scale)
}

/// The single value h_k(x).
pub fn hermite_value(k: usize, x: f64) -> f64 {
    let (cur, _, log_scale) = hermite_pair_scaled(k, x);
    cur * log_scale.exp()
}

/// Tensor-product eigenfunction Φ_μ(x) = Π h_{μ_i}(x_i).
pub fn phi_eval(mu: &MultiIndex, x: &[f64]) -> Result<f64> {
    if mu.dim() != x.len() {
        return Err(Error::DimensionMismatch {
            expected: mu.dim(),
            got: x.len(),
        });
    }
    Ok(mu
        .entries()
        .iter()
        .zip(x)
        .map(|(&m, &xi)| hermite_value(m as usize, xi))
        .product())
}

/// Eigenvalue 2k + d of the harmonic oscillator on the k-th eigenspace.
pub const fn eigenvalue(k: u64, d: u64) -> u64 {
    2 * k + d
}

/// Table `t[i * (k_max + 1) + k] = h_k(nodes[i])`.
pub(crate) fn hermite_table(k_max: usize, nodes: &[f64]) -> Vec<f64> {
    use rayon::prelude::*;
    let width = k_max + 1;
    let mut table = vec![0.0; nodes.len() * width];
    table
        .par_chunks_mut(width)
        .zip(nodes.par_iter())
        .for_each_init(Vec::new, |buf, (row, &x)| {
            hermite_eval_into(k_max, x, buf);
            row.copy_from_slice(buf);
        });
    table
}
