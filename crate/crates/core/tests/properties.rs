use std::f64::consts::PI;

use hermite_spectral::verification::{kappa_p, kappa_pq, random_band_limited};
use hermite_spectral::{
    eigenspace_size, enumerate_eigenspace, evolve_eigen, hermite_eval_1d, project, sobolev_norm, MultiIndex,
    SpectralField,
};
use num_complex::Complex64;
use proptest::prelude::*;

fn field_strategy() -> impl Strategy<Value = SpectralField> {
    (1usize..=3, 0usize..=8, any::<u64>()).prop_map(|(d, k, seed)| random_band_limited(k, d, seed).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn json_round_trip_is_exact(f in field_strategy()) {
        let back = SpectralField::from_json(&f.to_json().unwrap()).unwrap();
        prop_assert_eq!(back.dim(), f.dim());
        for (a, b) in back.coeffs().iter().zip(f.coeffs()) {
            prop_assert_eq!(a.re.to_bits(), b.re.to_bits());
            prop_assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
    }

    #[test]
    fn projections_partition_the_field(f in field_strategy()) {
        let mut total = f.zeros_like();
        for k in 0..=f.cutoff() {
            let pk = project(&f, k).unwrap();
            // idempotent
            let again = project(&pk, k).unwrap();
            prop_assert_eq!(again.coeffs(), pk.coeffs());
            for (t, c) in total.coeffs_mut().iter_mut().zip(pk.coeffs()) {
                *t += c;
            }
            if k > 0 {
                prop_assert!(project(&pk, k - 1).unwrap().is_zero());
            }
        }
        prop_assert_eq!(total.coeffs(), f.coeffs());
    }

    #[test]
    fn group_law(f in field_strategy(), s in -4.0f64..4.0, t in -4.0f64..4.0) {
        let a = evolve_eigen(&evolve_eigen(&f, s), t);
        let b = evolve_eigen(&f, s + t);
        prop_assert!(a.max_abs_diff(&b).unwrap() < 1e-12);
        prop_assert!((a.l2_norm() - f.l2_norm()).abs() < 1e-14);
    }

    #[test]
    fn evolution_preserves_sobolev_norms(f in field_strategy(), t in -3.0f64..3.0, s in -1.0f64..1.0) {
        let g = evolve_eigen(&f, t);
        prop_assert!((sobolev_norm(&g, s) - sobolev_norm(&f, s)).abs() <= 1e-13 * sobolev_norm(&f, s));
    }

    #[test]
    fn parity(k in 0usize..200, x in -20.0f64..20.0) {
        let a = hermite_eval_1d(k, x);
        let b = hermite_eval_1d(k, -x);
        for (j, (u, v)) in a.iter().zip(&b).enumerate() {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            prop_assert!((u - sign * v).abs() <= 1e-13 * u.abs().max(1e-300));
        }
    }

    #[test]
    fn eigenspace_enumeration(k in 0usize..12, d in 1usize..5) {
        let all = enumerate_eigenspace(k, d);
        prop_assert_eq!(all.len(), eigenspace_size(k, d));
        for (i, mu) in all.iter().enumerate() {
            prop_assert_eq!(mu.degree(), k);
            prop_assert_eq!(mu.rank_in_shell(), i);
        }
    }

    #[test]
    fn kappa_pq_shift(p in 2.0f64..40.0, q in 2.0f64..40.0, d in 3usize..6) {
        let kp = kappa_p(p, d).unwrap();
        prop_assert!((kappa_pq(p, q, d).unwrap() - (0.5 - 1.0 / q) - kp).abs() < 1e-15);
    }
}

#[test]
fn half_period_acts_by_parity() {
    // e^{iπH/2} Φ_μ = i^d (−1)^{|μ|} Φ_μ
    let mut f = SpectralField::new(2, 5).unwrap();
    f.set(&MultiIndex::new(vec![2, 1]), Complex64::new(1.0, 0.0)).unwrap();
    let g = evolve_eigen(&f, PI / 2.0);
    let c = g.get(&MultiIndex::new(vec![2, 1])).unwrap();
    assert!((c - Complex64::new(1.0, 0.0)).norm() < 1e-14);
}
