//! Hermite expansions on ℝ^d and the harmonic-oscillator Schrödinger group.
//!
//! Fields are stored as coefficient vectors over the Hermite basis Φ_μ,
//! |μ| ≤ K, in graded-lexicographic order. Everything downstream (evolution,
//! mixed norms, Triebel–Lizorkin norms) works on that representation and on
//! uniform sampling grids.
//!
//! ```
//! use hermite_spectral::{hermite_eval_1d, PI_POW_NEG_QUARTER};
//! let h = hermite_eval_1d(2, 0.0);
//! assert!((h[0] - PI_POW_NEG_QUARTER).abs() < 1e-15);
//! ```

pub mod error;
pub mod hermite;
pub mod propagator;
pub mod spaces;
pub mod spectral;
pub mod sum;
pub mod verification;

pub use error::{Error, Result};
pub use hermite::{
    eigenspace_size, eigenvalue, enumerate_eigenspace, gauss_hermite_rule, hermite_eval_1d, hermite_eval_into,
    hermite_value, make_grid, phi_eval, time_grid, GridSpec, MultiIndex, QuadratureRule, PI_POW_NEG_QUARTER,
};
pub use propagator::{
    calibrate_phase, evolve_eigen, evolve_kernel, evolve_space_time, mehler_kernel, KernelEvolution, PhaseConvention,
};
pub use spaces::{
    evolution_mixed_norm, lp_norm, mixed_norm, sobolev_norm, time_norm, triebel_norm, MixedNormSpec, NormOrder,
    SpaceTimeSamples,
};
pub use spectral::{analyze, analyze_samples, project, synthesize, SampledField, SpectralField};
