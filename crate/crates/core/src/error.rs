use thiserror::Error;

/// Errors produced by the braid, curve, tracking and checking routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid braid word: {0}")]
    InvalidWord(String),

    #[error("strand count {got} is too small (need at least {min})")]
    TooFewStrands { got: usize, min: usize },

    #[error("index {index} out of range 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },

    #[error("unknown library braid `{0}`")]
    UnknownLibrary(String),

    #[error("invalid curve: {0}")]
    InvalidCurve(String),

    #[error("braid power must be non-zero")]
    ZeroPower,

    #[error("satellite precondition violated: {0}")]
    SatelliteMismatch(String),

    #[error("eps = {eps} is too large: strands come within {min_gap:.3e} of each other")]
    EpsTooLarge { eps: f64, min_gap: f64 },

    #[error("root finder did not converge after {iterations} iterations (backward error {residual:.3e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("critical point tracking failed at t = {t:.12}: {reason}")]
    TrackingFailure { t: f64, reason: String },

    #[error("non-generic projection at t = {t:.12}: {reason}")]
    NonGeneric { t: f64, reason: String },

    #[error("strands collide at t = {t:.12}")]
    StrandCollision { t: f64 },

    #[error("polynomial degree {0} is too small for this operation")]
    DegreeTooSmall(usize),

    #[error("companion critical values have vanishing phase speed (min |T1| = {0:.3e})")]
    CompanionNotFibered(f64),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
