use crate::error::{Error, Result};

const BOUNDARY_EPS: f64 = 1e-12;

fn near(a: f64, b: f64) -> bool {
    (a - b).abs() <= BOUNDARY_EPS * b.abs().max(1.0)
}

/// Sharp exponent κ_p with ‖P_k‖_{L²→L^p} ≲ k^{κ_p}.
///
/// The boundary points (d = 1, p = 4) and (d = 2, p = 10/3) are rejected.
pub fn kappa_p(p: f64, d: usize) -> Result<f64> {
    if d == 0 {
        return Err(Error::InvalidParameter("dimension must be >= 1".into()));
    }
    if !(p >= 2.0) {
        return Err(Error::InvalidParameter(format!("kappa_p needs p in [2, inf], got {p}")));
    }
    let gap = 0.5 - 1.0 / p;
    let df = d as f64;
    if d == 1 {
        if near(p, 4.0) {
            return Err(Error::ExcludedBoundary { p, d });
        }
        return Ok(if p < 4.0 { 0.0 - 0.5 * gap } else { -1.0 / 6.0 + gap / 6.0 });
    }
    let first_break = 2.0 * (df + 3.0) / (df + 1.0);
    if near(p, first_break) {
        if d == 2 {
            return Err(Error::ExcludedBoundary { p, d });
        }
        return Ok(-1.0 / (2.0 * (df + 3.0)));
    }
    if p < first_break {
        return Ok(0.0 - 0.5 * gap);
    }
    let second_break = if d > 2 { 2.0 * df / (df - 2.0) } else { f64::INFINITY };
    if p <= second_break {
        Ok(-1.0 / 6.0 + df / 6.0 * gap)
    } else {
        Ok(-0.5 + df / 2.0 * gap)
    }
}

/// κ_{p,q} = (1/2 − 1/q) + κ_p, for 2 ≤ q < ∞.
pub fn kappa_pq(p: f64, q: f64, d: usize) -> Result<f64> {
    if !(q >= 2.0 && q.is_finite()) {
        return Err(Error::InvalidParameter(format!("kappa_pq needs q in [2, inf), got {q}")));
    }
    Ok(0.5 - 1.0 / q + kappa_p(p, d)?)
}
