use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sum;

/// Least-squares line through (log x, log v).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub k_values: Vec<u64>,
}

/// Fits log v = slope·log k + intercept.
pub fn fit_exponent(points: &[(u64, f64)]) -> Result<ExponentFit> {
    let abscissa: Vec<f64> = points.iter().map(|&(k, _)| k as f64).collect();
    fit_against(points, &abscissa)
}

/// Same fit with the abscissa for each point supplied separately (e.g. λ_k
/// instead of k); the k values are only recorded.
pub(crate) fn fit_against(points: &[(u64, f64)], abscissa: &[f64]) -> Result<ExponentFit> {
    if points.len() < 3 {
        return Err(Error::InvalidParameter(format!(
            "exponent fit needs at least 3 points, got {}",
            points.len()
        )));
    }
    if points.windows(2).any(|w| w[0].0 >= w[1].0) {
        return Err(Error::InvalidParameter("k values must be strictly increasing".into()));
    }
    for &(k, v) in points {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::NonPositive { k, value: v });
        }
    }
    if abscissa.iter().any(|&x| !(x > 0.0)) {
        return Err(Error::InvalidParameter("abscissa must be positive".into()));
    }
    let n = points.len() as f64;
    let xs: Vec<f64> = abscissa.iter().map(|x| x.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|&(_, v)| v.ln()).collect();
    let mx = sum::sum(xs.iter().copied()) / n;
    let my = sum::sum(ys.iter().copied()) / n;
    let sxx = sum::sum(xs.iter().map(|x| (x - mx) * (x - mx)));
    let sxy = sum::sum(xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)));
    let syy = sum::sum(ys.iter().map(|y| (y - my) * (y - my)));
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res = sum::sum(xs.iter().zip(&ys).map(|(x, y)| {
        let r = y - (intercept + slope * x);
        r * r
    }));
    let r_squared = if syy > 0.0 { (1.0 - ss_res / syy).clamp(0.0, 1.0) } else { 1.0 };
    Ok(ExponentFit {
        slope,
        intercept,
        r_squared,
        k_values: points.iter().map(|&(k, _)| k).collect(),
    })
}

/// Powers of two times {1, 1.5} inside [k_min, k_max].
pub fn geometric_k_values(k_min: u64, k_max: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut base = 1u64;
    while base <= k_max {
        for k in [base, base + base / 2] {
            if k >= k_min && k <= k_max && out.last() != Some(&k) {
                out.push(k);
            }
        }
        base *= 2;
    }
    out
}
