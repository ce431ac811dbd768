use thiserror::Error;

/// Errors produced by the Hermite toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension d = {0} exceeds the default limit of 4; use the high-dimension override")]
    DimensionLimit(usize),

    #[error("Gauss-Hermite node solver failed to converge for n = {n} (node {node})")]
    QuadratureNoConvergence { n: usize, node: usize },

    #[error("non-finite sample value at index {0}")]
    NonFinite(usize),

    #[error("shell k = {k} is outside the truncation window K = {cutoff}")]
    OutOfTruncation { k: usize, cutoff: usize },

    #[error("multiplier is undefined at eigenvalue {0}")]
    MultiplierUndefined(u64),

    #[error("singular time t = {t}: |sin 2t| = {sin2t:.3e} is below {threshold:.1e}; use the eigen path")]
    SingularTime { t: f64, sin2t: f64, threshold: f64 },

    #[error("phase calibration failed at t = {t}, d = {d}: best residual {residual:.3e}")]
    CalibrationFailed { t: f64, d: usize, residual: f64 },

    #[error("boundary case excluded: p = {p}, d = {d} is not covered by the exponent table")]
    ExcludedBoundary { p: f64, d: usize },

    #[error("grid too small: {0}")]
    GridTooSmall(String),

    #[error("fit data must be positive, got {value} at k = {k}")]
    NonPositive { k: u64, value: f64 },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("initial data is zero")]
    ZeroData,

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
