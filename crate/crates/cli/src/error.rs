use thiserror::Error;

/// Process exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_NUMERICAL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    /// A cross-check ran but disagreed.
    #[error("{0}")]
    CheckFailed(String),

    #[error(transparent)]
    Core(#[from] opke::Error),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    /// A sweep stopped at order `n`; the rows before it were written.
    #[error("n = {n}: {source} (partial report written to {path})")]
    Incomplete { n: usize, path: String, source: Box<CliError> },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use opke::Error as E;
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::CheckFailed(_) => EXIT_NUMERICAL,
            CliError::Io(_) => EXIT_USAGE,
            CliError::Incomplete { source, .. } => source.exit_code(),
            CliError::Core(e) => match e {
                E::InvalidInput(_)
                | E::Hypothesis(_)
                | E::CostGuard(_)
                | E::Parse(_)
                | E::Io(_)
                | E::ZeroDensity(_) => EXIT_USAGE,
                E::EigenNoConvergence { .. }
                | E::InsufficientDepth { .. }
                | E::NonFinite { .. }
                | E::ToleranceNotMet { .. }
                | E::LostPositivity { .. }
                | E::SingularPivot(_)
                | E::ZeroAcceptance { .. } => EXIT_NUMERICAL,
            },
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
