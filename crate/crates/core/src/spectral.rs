//! Hermite analysis and synthesis, spectral projections P_k, the projection
//! kernel Φ_k(x, y), Mehler's generating function and spectral multipliers.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hermite::{
    eigenspace_size, enumerate_eigenspace, gauss_hermite_rule, hermite_eval_1d, hermite_table,
    GridSpec, MultiIndex,
};
use crate::sum::{self, ComplexNeumaier};

/// Largest dimension accepted without the explicit override.
pub const DEFAULT_MAX_DIM: usize = 4;

/// The multi-indices with |μ| ≤ K in graded-lexicographic order, with the
/// offsets at which each eigenspace starts.
#[derive(Debug, PartialEq, Eq)]
pub struct IndexTable {
    dim: usize,
    cutoff: usize,
    entries: Vec<MultiIndex>,
    offsets: Vec<usize>,
}

impl IndexTable {
    fn new(dim: usize, cutoff: usize) -> Self {
        let mut entries = Vec::new();
        let mut offsets = Vec::with_capacity(cutoff + 2);
        for k in 0..=cutoff {
            offsets.push(entries.len());
            entries.extend(enumerate_eigenspace(k, dim));
        }
        offsets.push(entries.len());
        Self {
            dim,
            cutoff,
            entries,
            offsets,
        }
    }

    pub fn entries(&self) -> &[MultiIndex] {
        &self.entries
    }

    pub fn shell_range(&self, k: usize) -> std::ops::Range<usize> {
        self.offsets[k]..self.offsets[k + 1]
    }

    pub fn position(&self, mu: &MultiIndex) -> Option<usize> {
        if mu.dim() != self.dim {
            return None;
        }
        let k = mu.degree();
        (k <= self.cutoff).then(|| self.offsets[k] + mu.rank_in_shell())
    }
}

/// Truncated Hermite coefficient table {c_μ : |μ| ≤ K}.
#[derive(Debug, Clone)]
pub struct SpectralField {
    table: Arc<IndexTable>,
    coeffs: Vec<Complex64>,
}

impl PartialEq for SpectralField {
    fn eq(&self, other: &Self) -> bool {
        self.dim() == other.dim() && self.cutoff() == other.cutoff() && self.coeffs == other.coeffs
    }
}

impl SpectralField {
    /// Zero field; rejects d > 4.
    pub fn new(dim: usize, cutoff: usize) -> Result<Self> {
        if dim > DEFAULT_MAX_DIM {
            return Err(Error::DimensionLimit(dim));
        }
        Self::new_high_dim(dim, cutoff)
    }

    /// Zero field without the dimension limit.
    pub fn new_high_dim(dim: usize, cutoff: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be >= 1".into()));
        }
        let table = Arc::new(IndexTable::new(dim, cutoff));
        let coeffs = vec![Complex64::new(0.0, 0.0); table.entries.len()];
        Ok(Self { table, coeffs })
    }

    /// Φ_μ as a field truncated at `cutoff`.
    pub fn basis(dim: usize, cutoff: usize, mu: &MultiIndex) -> Result<Self> {
        let mut f = Self::new(dim, cutoff)?;
        f.set(mu, Complex64::new(1.0, 0.0))?;
        Ok(f)
    }

    /// Zero field sharing this field's index table.
    pub fn zeros_like(&self) -> Self {
        Self {
            table: Arc::clone(&self.table),
            coeffs: vec![Complex64::new(0.0, 0.0); self.coeffs.len()],
        }
    }

    pub fn dim(&self) -> usize {
        self.table.dim
    }

    pub fn cutoff(&self) -> usize {
        self.table.cutoff
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.table.entries
    }

    pub fn table(&self) -> &IndexTable {
        &self.table
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn shell(&self, k: usize) -> &[Complex64] {
        &self.coeffs[self.table.shell_range(k)]
    }

    pub fn get(&self, mu: &MultiIndex) -> Option<Complex64> {
        self.table.position(mu).map(|i| self.coeffs[i])
    }

    pub fn set(&mut self, mu: &MultiIndex, value: Complex64) -> Result<()> {
        if mu.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: mu.dim(),
            });
        }
        let i = self.table.position(mu).ok_or(Error::OutOfTruncation {
            k: mu.degree(),
            cutoff: self.cutoff(),
        })?;
        self.coeffs[i] = value;
        Ok(())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&MultiIndex, Complex64)> {
        self.table.entries.iter().zip(self.coeffs.iter().copied())
    }

    /// ‖P_k f‖²
    pub fn shell_norm_sqr(&self, k: usize) -> f64 {
        sum::sum(self.shell(k).iter().map(|c| c.norm_sqr()))
    }

    /// L² norm by Parseval.
    pub fn l2_norm(&self) -> f64 {
        sum::sum(self.coeffs.iter().map(|c| c.norm_sqr())).sqrt()
    }

    /// Shells whose coefficients are not all zero.
    pub fn active_shells(&self) -> Vec<usize> {
        (0..=self.cutoff())
            .filter(|&k| self.shell(k).iter().any(|c| *c != Complex64::new(0.0, 0.0)))
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == Complex64::new(0.0, 0.0))
    }

    pub fn scale(&mut self, factor: Complex64) {
        for c in &mut self.coeffs {
            *c *= factor;
        }
    }

    /// Largest coefficient-wise modulus of the difference.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_same_shape(other)?;
        Ok(self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    pub(crate) fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        if self.cutoff() != other.cutoff() {
            return Err(Error::InvalidParameter(format!(
                "cutoff mismatch: {} vs {}",
                self.cutoff(),
                other.cutoff()
            )));
        }
        Ok(())
    }

    /// JSON object `{dim, cutoff, coeffs: [[μ…], re, im]…}` in graded-lex order.
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&self.to_repr())?)
    }

    pub fn to_json_pretty(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_repr())?)
    }

    fn to_repr(&self) -> FieldRepr {
        FieldRepr {
            dim: self.dim(),
            cutoff: self.cutoff(),
            coeffs: self
                .iter()
                .map(|(mu, c)| (mu.entries().to_vec(), c.re, c.im))
                .collect(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_json_with(text, false)
    }

    /// Parses a field; entries may come in any order, omitted entries are zero.
    pub fn from_json_with(text: &str, allow_high_dim: bool) -> Result<Self> {
        let repr: FieldRepr = serde_json::from_str(text)?;
        let mut field = if allow_high_dim {
            Self::new_high_dim(repr.dim, repr.cutoff)?
        } else {
            Self::new(repr.dim, repr.cutoff)?
        };
        let mut seen = vec![false; field.len()];
        for (mu, re, im) in repr.coeffs {
            let mu = MultiIndex::new(mu);
            if mu.dim() != field.dim() {
                return Err(Error::DimensionMismatch {
                    expected: field.dim(),
                    got: mu.dim(),
                });
            }
            let i = field.table.position(&mu).ok_or(Error::OutOfTruncation {
                k: mu.degree(),
                cutoff: field.cutoff(),
            })?;
            if std::mem::replace(&mut seen[i], true) {
                return Err(Error::InvalidParameter(format!("duplicate coefficient for {mu}")));
            }
            if !(re.is_finite() && im.is_finite()) {
                return Err(Error::NonFinite(i));
            }
            field.coeffs[i] = Complex64::new(re, im);
        }
        Ok(field)
    }
}

#[derive(Serialize, Deserialize)]
struct FieldRepr {
    dim: usize,
    cutoff: usize,
    coeffs: Vec<(Vec<u32>, f64, f64)>,
}

/// Complex samples of a function on a tensor grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledField {
    pub grid: GridSpec,
    pub values: Vec<Complex64>,
}

impl SampledField {
    pub fn new(grid: GridSpec, values: Vec<Complex64>) -> Result<Self> {
        grid.validate()?;
        if values.len() != grid.num_points() {
            return Err(Error::InvalidParameter(format!(
                "sample count {} does not match grid size {}",
                values.len(),
                grid.num_points()
            )));
        }
        Ok(Self { grid, values })
    }

    /// Samples a function at every grid point.
    pub fn from_fn<F>(grid: GridSpec, f: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> Complex64 + Sync,
    {
        grid.validate()?;
        let axis = grid.axis();
        let values = (0..grid.num_points())
            .into_par_iter()
            .map_init(
                || (vec![0usize; grid.dim], vec![0.0; grid.dim]),
                |(idx, x), p| {
                    grid.unravel(p, idx);
                    for (xi, &i) in x.iter_mut().zip(idx.iter()) {
                        *xi = axis[i];
                    }
                    f(x)
                },
            )
            .collect();
        Ok(Self { grid, values })
    }

    /// Largest modulus over the faces of the box.
    pub fn boundary_magnitude(&self) -> f64 {
        self.grid
            .boundary_points()
            .into_iter()
            .map(|p| self.values[p].norm())
            .fold(0.0, f64::max)
    }

    /// L² norm by tensor trapezoid.
    pub fn l2_norm(&self) -> f64 {
        let w = self.grid.weights();
        sum::sum(w.iter().zip(&self.values).map(|(w, v)| w * v.norm_sqr())).sqrt()
    }
}

/// Table of h_k on the grid axis, shared by every per-point basis evaluation.
pub(crate) struct GridBasis {
    k_max: usize,
    table: Vec<f64>,
}

impl GridBasis {
    pub fn new(grid: GridSpec, k_max: usize) -> Self {
        let table = hermite_table(k_max, &grid.axis());
        Self { k_max, table }
    }

    #[inline]
    fn h(&self, axis_index: usize, k: usize) -> f64 {
        self.table[axis_index * (self.k_max + 1) + k]
    }

    #[inline]
    pub fn phi(&self, mu: &MultiIndex, axis_idx: &[usize]) -> f64 {
        mu.entries()
            .iter()
            .zip(axis_idx)
            .map(|(&m, &i)| self.h(i, m as usize))
            .product()
    }

    /// out[k] = (P_k f)(x_p) for every k ≤ K.
    pub fn shell_values(&self, field: &SpectralField, axis_idx: &[usize], out: &mut [Complex64]) {
        debug_assert!(field.cutoff() <= self.k_max);
        for (k, slot) in out.iter_mut().enumerate().take(field.cutoff() + 1) {
            let range = field.table.shell_range(k);
            let mut acc = ComplexNeumaier::new();
            for (mu, c) in field.table.entries[range.clone()].iter().zip(&field.coeffs[range]) {
                if *c != Complex64::new(0.0, 0.0) {
                    acc.add(c * self.phi(mu, axis_idx));
                }
            }
            *slot = acc.value();
        }
    }
}

fn check_dim(field: &SpectralField, grid: &GridSpec) -> Result<()> {
    if field.dim() != grid.dim {
        return Err(Error::DimensionMismatch {
            expected: field.dim(),
            got: grid.dim,
        });
    }
    Ok(())
}

/// Pointwise shell values P_k f(x) for every grid point: `result[p][k]`.
pub fn shell_samples(field: &SpectralField, grid: &GridSpec) -> Result<Vec<Vec<Complex64>>> {
    check_dim(field, grid)?;
    grid.validate()?;
    let basis = GridBasis::new(*grid, field.cutoff());
    let kk = field.cutoff() + 1;
    Ok((0..grid.num_points())
        .into_par_iter()
        .map_init(
            || vec![0usize; grid.dim],
            |idx, p| {
                grid.unravel(p, idx);
                let mut out = vec![Complex64::new(0.0, 0.0); kk];
                basis.shell_values(field, idx, &mut out);
                out
            },
        )
        .collect())
}

/// Pointwise Σ_μ c_μ Φ_μ(x) on the grid.
pub fn synthesize(field: &SpectralField, grid: &GridSpec) -> Result<SampledField> {
    let shells = shell_samples(field, grid)?;
    let values = shells.into_iter().map(sum::sum_complex).collect();
    SampledField::new(*grid, values)
}

/// Coefficients ⟨f, Φ_μ⟩ for |μ| ≤ K by tensor Gauss–Hermite quadrature with
/// the default 2K + 16 nodes per dimension.
pub fn analyze<F>(f: F, cutoff: usize, dim: usize) -> Result<SpectralField>
where
    F: Fn(&[f64]) -> Complex64 + Sync,
{
    analyze_with_nodes(f, cutoff, dim, 2 * cutoff + 16)
}

pub fn analyze_with_nodes<F>(f: F, cutoff: usize, dim: usize, nodes_per_dim: usize) -> Result<SpectralField>
where
    F: Fn(&[f64]) -> Complex64 + Sync,
{
    let mut field = SpectralField::new(dim, cutoff)?;
    let rule = gauss_hermite_rule(nodes_per_dim)?;
    let n = rule.len();
    let total = n.pow(dim as u32);
    let table = hermite_table(cutoff, &rule.nodes);

    let unravel = |mut p: usize, idx: &mut [usize]| {
        for slot in idx.iter_mut().rev() {
            *slot = p % n;
            p /= n;
        }
    };
    // f·Π W at every tensor node
    let mut weighted = Vec::with_capacity(total);
    let mut idx = vec![0usize; dim];
    let mut x = vec![0.0; dim];
    let mut node_idx = Vec::with_capacity(total);
    for p in 0..total {
        unravel(p, &mut idx);
        for (xi, &i) in x.iter_mut().zip(idx.iter()) {
            *xi = rule.nodes[i];
        }
        let v = f(&x);
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::NonFinite(p));
        }
        let w: f64 = idx.iter().map(|&i| rule.scaled_weights[i]).product();
        weighted.push(v * w);
        node_idx.push(idx.clone());
    }

    let width = cutoff + 1;
    let coeffs: Vec<Complex64> = field
        .table
        .entries
        .par_iter()
        .map(|mu| {
            sum::sum_complex(weighted.iter().zip(&node_idx).map(|(v, idx)| {
                let phi: f64 = mu
                    .entries()
                    .iter()
                    .zip(idx)
                    .map(|(&m, &i)| table[i * width + m as usize])
                    .product();
                v * phi
            }))
        })
        .collect();
    field.coeffs = coeffs;
    Ok(field)
}

/// Coefficients of grid samples by tensor trapezoid quadrature.
pub fn analyze_samples(samples: &SampledField, cutoff: usize) -> Result<SpectralField> {
    let grid = samples.grid;
    if let Some(i) = samples
        .values
        .iter()
        .position(|v| !(v.re.is_finite() && v.im.is_finite()))
    {
        return Err(Error::NonFinite(i));
    }
    let mut field = SpectralField::new(grid.dim, cutoff)?;
    let basis = GridBasis::new(grid, cutoff);
    let weights = grid.weights();
    let points: Vec<Vec<usize>> = (0..grid.num_points())
        .map(|p| {
            let mut idx = vec![0; grid.dim];
            grid.unravel(p, &mut idx);
            idx
        })
        .collect();
    field.coeffs = field
        .table
        .entries
        .par_iter()
        .map(|mu| {
            sum::sum_complex(
                points
                    .iter()
                    .zip(&weights)
                    .zip(&samples.values)
                    .map(|((idx, w), v)| v * (w * basis.phi(mu, idx))),
            )
        })
        .collect();
    Ok(field)
}

/// P_k: keeps exactly the coefficients with |μ| = k.
pub fn project(field: &SpectralField, k: usize) -> Result<SpectralField> {
    if k > field.cutoff() {
        return Err(Error::OutOfTruncation {
            k,
            cutoff: field.cutoff(),
        });
    }
    let mut out = field.zeros_like();
    let range = field.table.shell_range(k);
    out.coeffs[range.clone()].copy_from_slice(&field.coeffs[range]);
    Ok(out)
}

/// Φ_k(x, y) = Σ_{|μ|=k} Φ_μ(x) Φ_μ(y).
pub fn kernel_phi_k(k: usize, x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            got: y.len(),
        });
    }
    if x.is_empty() {
        return Err(Error::InvalidParameter("points must have dimension >= 1".into()));
    }
    let hx: Vec<Vec<f64>> = x.iter().map(|&xi| hermite_eval_1d(k, xi)).collect();
    let hy: Vec<Vec<f64>> = y.iter().map(|&yi| hermite_eval_1d(k, yi)).collect();
    let terms = enumerate_eigenspace(k, x.len()).into_iter().map(|mu| {
        mu.entries()
            .iter()
            .enumerate()
            .map(|(i, &m)| hx[i][m as usize] * hy[i][m as usize])
            .product::<f64>()
    });
    Ok(sum::sum(terms))
}

/// Mehler's closed form of Σ_k ω^k Φ_k(x, y) for |ω| < 1.
pub fn mehler_closed_form(omega: f64, x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            got: y.len(),
        });
    }
    if !(omega.abs() < 1.0) {
        return Err(Error::InvalidParameter(format!("Mehler formula needs |omega| < 1, got {omega}")));
    }
    let d = x.len() as f64;
    let one_minus = 1.0 - omega * omega;
    let norm_sq = sum::sum(x.iter().chain(y).map(|v| v * v));
    let dot = sum::sum(x.iter().zip(y).map(|(a, b)| a * b));
    let exponent = -0.5 * (1.0 + omega * omega) / one_minus * norm_sq + 2.0 * omega / one_minus * dot;
    Ok(std::f64::consts::PI.powf(-0.5 * d) * one_minus.powf(-0.5 * d) * exponent.exp())
}

/// Truncated generating series Σ_{k ≤ terms} ω^k Φ_k(x, y).
pub fn mehler_series(omega: f64, x: &[f64], y: &[f64], terms: usize) -> Result<f64> {
    let mut acc = sum::Neumaier::new();
    let mut w = 1.0;
    for k in 0..=terms {
        acc.add(w * kernel_phi_k(k, x, y)?);
        w *= omega;
    }
    Ok(acc.value())
}

/// m(H): c_μ ← m(2|μ| + d)·c_μ.
pub fn apply_multiplier<M>(field: &SpectralField, m: M) -> Result<SpectralField>
where
    M: Fn(u64) -> Option<Complex64>,
{
    let mut out = field.clone();
    let d = field.dim() as u64;
    for k in 0..=field.cutoff() {
        let lambda = crate::hermite::eigenvalue(k as u64, d);
        let factor = m(lambda).ok_or(Error::MultiplierUndefined(lambda))?;
        for c in &mut out.coeffs[field.table.shell_range(k)] {
            *c *= factor;
        }
    }
    Ok(out)
}

/// Number of coefficients in a field of the given shape.
pub fn field_len(dim: usize, cutoff: usize) -> usize {
    (0..=cutoff).map(|k| eigenspace_size(k, dim)).sum()
}
