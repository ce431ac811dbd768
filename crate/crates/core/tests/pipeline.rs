//! End-to-end paths through the public API.

use std::f64::consts::PI;

use hermite_spectral::verification::{random_band_limited, run_checks, ExperimentConfig};
use hermite_spectral::{
    analyze, analyze_samples, evolution_mixed_norm, evolve_eigen, evolve_space_time, mixed_norm, phi_eval, synthesize,
    GridSpec, MixedNormSpec, MultiIndex, NormOrder, SampledField,
};
use num_complex::Complex64;

#[test]
fn analysis_inverts_synthesis() {
    for d in [1usize, 2] {
        let f = random_band_limited(9, d, 4).unwrap();
        let grid = GridSpec::for_cutoff(9, d);
        let back = analyze_samples(&synthesize(&f, &grid).unwrap(), 9).unwrap();
        assert!(back.max_abs_diff(&f).unwrap() < 1e-12);
    }
}

#[test]
fn quadrature_analysis_of_a_gaussian() {
    // e^{-|x|²/2} = π^{d/4} Φ_0
    let f = analyze(|x: &[f64]| Complex64::new((-0.5 * x.iter().map(|v| v * v).sum::<f64>()).exp(), 0.0), 6, 2).unwrap();
    let c0 = f.get(&MultiIndex::new(vec![0, 0])).unwrap();
    assert!((c0.re - PI.powf(0.5)).abs() < 1e-13);
    assert!(f.coeffs()[1..].iter().all(|c| c.norm() < 1e-13));
}

#[test]
fn coherent_state_moves_along_the_classical_orbit() {
    // e^{itH} of a shifted Gaussian is again a Gaussian centred at x0·cos 2t
    let x0 = 1.5;
    let f = analyze(
        |x: &[f64]| Complex64::new(PI.powf(-0.25) * (-0.5 * (x[0] - x0).powi(2)).exp(), 0.0),
        60,
        1,
    )
    .unwrap();
    let t = 0.4;
    let grid = GridSpec::for_cutoff(60, 1);
    let u = synthesize(&evolve_eigen(&f, t), &grid).unwrap();
    let axis = grid.axis();
    let w = grid.weights();
    let mean: f64 = axis
        .iter()
        .zip(&u.values)
        .zip(&w)
        .map(|((x, v), w)| w * x * v.norm_sqr())
        .sum();
    assert!((mean - x0 * (2.0 * t).cos()).abs() < 1e-9);
}

#[test]
fn streaming_mixed_norm_matches_materialized() {
    let f = random_band_limited(7, 2, 8).unwrap();
    let grid = GridSpec::for_cutoff(7, 2);
    let u = evolve_space_time(&f, &grid, 72).unwrap();
    for (p, q) in [(2.0, 2.0), (4.0, 3.0), (f64::INFINITY, 6.0)] {
        let a = mixed_norm(&u, MixedNormSpec::new(p, q, NormOrder::XThenT).unwrap()).unwrap();
        let b = evolution_mixed_norm(&f, &grid, 72, p, q).unwrap();
        assert!((a - b).abs() <= 1e-12 * a);
    }
}

#[test]
fn sampled_field_from_basis_function() {
    let grid = GridSpec::for_cutoff(4, 2);
    let mu = MultiIndex::new(vec![3, 1]);
    let s = SampledField::from_fn(grid, |x| Complex64::new(phi_eval(&mu, x).unwrap(), 0.0)).unwrap();
    let f = analyze_samples(&s, 4).unwrap();
    assert!((f.get(&mu).unwrap().re - 1.0).abs() < 1e-12);
}

#[test]
fn suite_is_reproducible() {
    let cfg = ExperimentConfig {
        seed: 3,
        ..ExperimentConfig::default()
    };
    let only: Vec<String> = ["mehler", "unitarity_periodicity", "wainger"].map(String::from).to_vec();
    let a = run_checks(&cfg, Some(&only)).unwrap();
    let b = run_checks(&cfg, Some(&only)).unwrap();
    assert_eq!(a.to_json_pretty().unwrap(), b.to_json_pretty().unwrap());
    assert!(a.passed);
    assert_eq!(a.checks.len(), 3);
}
