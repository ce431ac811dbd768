//! Exponent tables, empirical fits and the check suite.

mod experiments;
mod fit;
mod kappa;
mod rodrigues;
mod suite;

pub use experiments::{
    eigenfunction_grid, lemma1_identity_check, projection_norm_1d, random_band_limited, sharpness_probe,
    strichartz_ratio, wainger_probe, wainger_ratio, IdentityCheck, Numerics, SharpnessOutcome,
};
pub use fit::{fit_exponent, geometric_k_values, ExponentFit};
pub use kappa::{kappa_p, kappa_pq};
pub use rodrigues::{hermite_poly, hermite_poly_scaled, rodrigues_value};
pub use suite::{
    run_checks, run_suite, CaseRecord, CheckRecord, ExperimentConfig, Relation, Report, CHECK_NAMES, RODRIGUES_POINTS,
};
