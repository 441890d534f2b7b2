use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Malformed arguments: wrong lengths, non-positive tolerances, bad parameters.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A mathematical hypothesis of a formula is violated (real pole, coinciding
    /// shifts, more shifts than particles).
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("tridiagonal eigensolver did not converge for eigenvalue {index} after {sweeps} sweeps")]
    EigenNoConvergence { index: usize, sweeps: usize },

    /// The recurrence table is too shallow for the requested operation.
    #[error("recurrence depth {available} is insufficient, {required} coefficient pairs required")]
    InsufficientDepth { required: usize, available: usize },

    #[error("non-finite value {value} at node t = {node}")]
    NonFinite { node: f64, value: Complex64 },

    #[error(
        "adaptive integration did not reach tolerance: best estimate {estimate}, achieved error {achieved:e}"
    )]
    ToleranceNotMet { estimate: Complex64, achieved: f64 },

    #[error("discretized Stieltjes procedure lost positivity at step {step}; achievable depth is {achievable}")]
    LostPositivity { step: usize, achievable: usize },

    #[error("density vanishes or is undefined at x = {0}")]
    ZeroDensity(f64),

    #[error("pivot magnitude {0:e} below threshold: shifts are nearly coincident")]
    SingularPivot(f64),

    #[error("no proposal accepted within a window of {window} sweeps; reduce the proposal scale")]
    ZeroAcceptance { window: usize },

    #[error("cost guard: {0}")]
    CostGuard(String),

    #[error("{0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
