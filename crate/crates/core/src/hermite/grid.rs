use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform tensor grid on the box [−L, L]^d plus a time-grid size over (−π, π).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub dim: usize,
    pub half_width: f64,
    pub points_per_dim: usize,
    pub time_points: usize,
}

impl GridSpec {
    pub fn new(dim: usize, half_width: f64, points_per_dim: usize, time_points: usize) -> Result<Self> {
        let spec = Self {
            dim,
            half_width,
            points_per_dim,
            time_points,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::InvalidParameter("grid dimension must be >= 1".into()));
        }
        if !(self.half_width > 0.0 && self.half_width.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "grid half-width must be positive, got {}",
                self.half_width
            )));
        }
        if self.points_per_dim < 2 {
            return Err(Error::InvalidParameter("grid needs at least 2 points per dimension".into()));
        }
        if self.time_points == 0 {
            return Err(Error::InvalidParameter("time grid needs at least 1 point".into()));
        }
        Ok(())
    }

    /// Default sizing for fields truncated at `cutoff`: box half-width
    /// 1.2·√(2K+d) + 5, spacing at most π / (2(√(2K+d) + 3)), an odd point
    /// count so the origin is a grid point, and 8K + 16 time points.
    pub fn for_cutoff(cutoff: usize, dim: usize) -> Self {
        Self::for_cutoff_scaled(cutoff, dim, 1.0)
    }

    /// Like [`GridSpec::for_cutoff`] with the box half-width multiplied by `box_scale`
    /// at fixed spacing.
    pub fn for_cutoff_scaled(cutoff: usize, dim: usize, box_scale: f64) -> Self {
        let turning = ((2 * cutoff + dim) as f64).sqrt();
        let half_width = box_scale * (1.2 * turning + 5.0);
        let step = std::f64::consts::PI / (2.0 * (turning + 3.0));
        Self {
            dim,
            half_width,
            points_per_dim: Self::odd_count(half_width, step),
            time_points: 8 * cutoff + 16,
        }
    }

    pub(crate) fn odd_count(half_width: f64, step: f64) -> usize {
        let intervals = (2.0 * half_width / step).ceil() as usize;
        let intervals = intervals.max(2);
        // even number of intervals keeps 0 on the grid
        (intervals + intervals % 2) + 1
    }

    pub fn step(&self) -> f64 {
        2.0 * self.half_width / (self.points_per_dim - 1) as f64
    }

    pub fn num_points(&self) -> usize {
        self.points_per_dim.pow(self.dim as u32)
    }

    /// One-dimensional coordinates −L, −L + h, …, L.
    pub fn axis(&self) -> Vec<f64> {
        let n = self.points_per_dim;
        let h = self.step();
        (0..n)
            .map(|i| {
                // mirror the upper half so the grid is exactly symmetric
                let j = i.min(n - 1 - i);
                let v = -self.half_width + j as f64 * h;
                if i == j {
                    v
                } else {
                    -v
                }
            })
            .map(|v| if v == 0.0 { 0.0 } else { v })
            .collect()
    }

    /// Trapezoid weights along one axis.
    pub fn axis_weights(&self) -> Vec<f64> {
        let n = self.points_per_dim;
        let h = self.step();
        (0..n)
            .map(|i| if i == 0 || i == n - 1 { 0.5 * h } else { h })
            .collect()
    }

    /// Per-axis indices of flat point `index` (last axis fastest).
    pub fn unravel(&self, mut index: usize, out: &mut [usize]) {
        let n = self.points_per_dim;
        for slot in out.iter_mut().rev() {
            *slot = index % n;
            index /= n;
        }
    }

    /// Tensor trapezoid weights for every grid point, row-major.
    pub fn weights(&self) -> Vec<f64> {
        let w1 = self.axis_weights();
        let mut idx = vec![0; self.dim];
        (0..self.num_points())
            .map(|p| {
                self.unravel(p, &mut idx);
                idx.iter().map(|&i| w1[i]).product()
            })
            .collect()
    }

    /// Flat indices of points lying on the boundary of the box.
    pub fn boundary_points(&self) -> Vec<usize> {
        let n = self.points_per_dim;
        let mut idx = vec![0; self.dim];
        (0..self.num_points())
            .filter(|&p| {
                self.unravel(p, &mut idx);
                idx.iter().any(|&i| i == 0 || i == n - 1)
            })
            .collect()
    }

    /// Midpoint time samples t_j = −π + (j + ½)·2π/N_t.
    pub fn times(&self) -> Vec<f64> {
        time_grid(self.time_points)
    }
}

/// Midpoint samples of (−π, π) with spacing 2π/n.
pub fn time_grid(n: usize) -> Vec<f64> {
    let dt = 2.0 * std::f64::consts::PI / n as f64;
    (0..n)
        .map(|j| -std::f64::consts::PI + (j as f64 + 0.5) * dt)
        .collect()
}

/// All grid points, row-major with the last axis fastest.
pub fn make_grid(spec: &GridSpec) -> Vec<Vec<f64>> {
    let axis = spec.axis();
    let mut idx = vec![0; spec.dim];
    (0..spec.num_points())
        .map(|p| {
            spec.unravel(p, &mut idx);
            idx.iter().map(|&i| axis[i]).collect()
        })
        .collect()
}
