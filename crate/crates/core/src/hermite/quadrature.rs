use super::hermite_pair_scaled;
use crate::error::{Error, Result};

const MAX_NEWTON: usize = 100;

/// Gauss–Hermite rule for the weight e^{−x²} on the real line.
///
/// `scaled_weights` carry the weight factored out (`w_i e^{x_i²}`), so that
/// `Σ scaled_weights[i] g(nodes[i])` approximates `∫ g(x) dx` directly.
/// For very large n the outermost plain `weights` underflow to zero; the
/// scaled weights stay finite.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub scaled_weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Σ w_i g(x_i) ≈ ∫ g(x) e^{−x²} dx
    pub fn integrate_weighted<F: Fn(f64) -> f64>(&self, g: F) -> f64 {
        crate::sum::sum(self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * g(x)))
    }

    /// Σ W_i g(x_i) ≈ ∫ g(x) dx
    pub fn integrate<F: Fn(f64) -> f64>(&self, g: F) -> f64 {
        crate::sum::sum(
            self.nodes
                .iter()
                .zip(&self.scaled_weights)
                .map(|(&x, &w)| w * g(x)),
        )
    }
}

/// n-point Gauss–Hermite rule by Newton iteration on h_n from asymptotic
/// starting guesses.
pub fn gauss_hermite_rule(n: usize) -> Result<QuadratureRule> {
    if n == 0 {
        return Err(Error::InvalidParameter("quadrature needs n >= 1".into()));
    }
    let nf = n as f64;
    let half = n.div_ceil(2);
    // largest roots first
    let mut roots = Vec::with_capacity(half);
    let mut log_w = Vec::with_capacity(half);
    let mut z = 0.0f64;
    for i in 0..half {
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-0.16667),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * roots[0],
            3 => 1.91 * z - 0.91 * roots[1],
            _ => 2.0 * z - roots[i - 2],
        };
        if n % 2 == 1 && i == half - 1 {
            z = 0.0;
        }
        let mut converged = false;
        for _ in 0..MAX_NEWTON {
            let (hn, hn1, _) = hermite_pair_scaled(n, z);
            // h_n' = √(2n) h_{n−1} − x h_n; the Gaussian scale cancels in the ratio
            let deriv = (2.0 * nf).sqrt() * hn1 - z * hn;
            let step = hn / deriv;
            z -= step;
            if step.abs() <= 1e-15 * z.abs().max(1.0) {
                converged = true;
                break;
            }
        }
        if !converged || !z.is_finite() {
            return Err(Error::QuadratureNoConvergence { n, node: i });
        }
        let (_, hn1, log_scale) = hermite_pair_scaled(n, z);
        // W = 1 / (n h_{n−1}(z)²)
        log_w.push(-2.0 * log_scale - (nf * hn1 * hn1).ln());
        roots.push(z);
    }

    let mut nodes = vec![0.0; n];
    let mut scaled_weights = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for (i, (&r, &lw)) in roots.iter().zip(&log_w).enumerate() {
        let lo = i;
        let hi = n - 1 - i;
        nodes[lo] = -r;
        nodes[hi] = r;
        let sw = lw.exp();
        let w = (lw - r * r).exp();
        scaled_weights[lo] = sw;
        scaled_weights[hi] = sw;
        weights[lo] = w;
        weights[hi] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    if nodes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::QuadratureNoConvergence { n, node: 0 });
    }
    Ok(QuadratureRule {
        nodes,
        weights,
        scaled_weights,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const SQRT_PI: f64 = 1.772_453_850_905_516;

    #[test]
    fn one_point() {
        let r = gauss_hermite_rule(1).unwrap();
        assert_eq!(r.nodes, vec![0.0]);
        assert_relative_eq!(r.weights[0], SQRT_PI, max_relative = 1e-15);
    }

    #[test]
    fn two_points() {
        let r = gauss_hermite_rule(2).unwrap();
        let a = std::f64::consts::FRAC_1_SQRT_2;
        assert_relative_eq!(r.nodes[0], -a, max_relative = 1e-15);
        assert_relative_eq!(r.nodes[1], a, max_relative = 1e-15);
        for w in &r.weights {
            assert_relative_eq!(*w, SQRT_PI / 2.0, max_relative = 1e-14);
        }
    }

    #[test]
    fn zero_points_rejected() {
        assert!(gauss_hermite_rule(0).is_err());
    }

    // ∫ x^{2j} e^{−x²} dx = Γ(j + 1/2)
    fn even_moment(j: u32) -> f64 {
        let mut g = SQRT_PI;
        for i in 0..j {
            g *= i as f64 + 0.5;
        }
        g
    }

    #[test]
    fn exact_for_polynomials() {
        for n in [1usize, 2, 3, 5, 8, 13, 20, 33] {
            let r = gauss_hermite_rule(n).unwrap();
            for m in 0..(2 * n as u32) {
                let q = r.integrate_weighted(|x| x.powi(m as i32));
                if m % 2 == 1 {
                    assert!(q.abs() < 1e-12 * even_moment(m / 2 + 1), "n={n} m={m} q={q}");
                } else {
                    assert_relative_eq!(q, even_moment(m / 2), max_relative = 1e-12);
                }
            }
        }
    }

    #[test]
    fn structure_for_many_sizes() {
        for n in [4usize, 17, 64, 81, 150, 300, 500] {
            let r = gauss_hermite_rule(n).unwrap();
            assert!(r.nodes.windows(2).all(|w| w[0] < w[1]));
            for i in 0..n {
                assert_eq!(r.nodes[i], -r.nodes[n - 1 - i]);
                assert_eq!(r.scaled_weights[i], r.scaled_weights[n - 1 - i]);
            }
            let total = crate::sum::sum(r.weights.iter().copied());
            assert_relative_eq!(total, SQRT_PI, max_relative = 1e-12);
            if n <= 300 {
                assert!(r.weights.iter().all(|&w| w > 0.0));
            }
        }
    }
}
