//! Exact physicists' Hermite polynomials from the Rodrigues formula.
//!
//! With H_k(x)e^{−x²} = (−1)^k (d/dx)^k e^{−x²}, differentiating once more gives
//! H_{k+1} = 2xH_k − H_k', which keeps every coefficient an integer.

use std::f64::consts::PI;

/// Integer coefficients of H_k, lowest degree first.
pub fn hermite_poly(k: usize) -> Vec<i128> {
    let mut p = vec![1i128];
    for _ in 0..k {
        let mut next = vec![0i128; p.len() + 1];
        for (j, &c) in p.iter().enumerate() {
            next[j + 1] += 2 * c;
            if j > 0 {
                next[j - 1] -= j as i128 * c;
            }
        }
        p = next;
    }
    p
}

/// den^k · H_k(num/den), exactly.
pub fn hermite_poly_scaled(k: usize, num: i128, den: i128) -> i128 {
    hermite_poly(k)
        .iter()
        .enumerate()
        .map(|(j, &c)| c * num.pow(j as u32) * den.pow((k - j) as u32))
        .sum()
}

/// h_k(num/den) with the only rounding in the final normalization.
pub fn rodrigues_value(k: usize, num: i128, den: i128) -> f64 {
    let x = num as f64 / den as f64;
    let poly = hermite_poly_scaled(k, num, den) as f64 / (den as f64).powi(k as i32);
    let factorial: f64 = (1..=k).map(|j| j as f64).product();
    let norm = (2f64.powi(k as i32) * factorial * PI.sqrt()).sqrt();
    poly * (-0.5 * x * x).exp() / norm
}
