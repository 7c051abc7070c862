use thiserror::Error;

/// Failure modes shared by every module. Each variant maps onto one of the
/// CLI exit codes (see [`Error::exit_code`]).
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Malformed or dimensionally inconsistent input.
    #[error("input error: {0}")]
    Input(String),
    /// Input is well formed but violates a mathematical precondition.
    #[error("domain error: {0}")]
    Domain(String),
    /// The geodesic integrator could not make progress.
    #[error("integration error: {0}")]
    Integration(String),
    /// One or more verification suites failed.
    #[error("verification failed: {}", .0.join("; "))]
    Verification(Vec<String>),
}

impl Error {
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Input(_) => 2,
            Error::Domain(_) => 3,
            Error::Integration(_) => 4,
            Error::Verification(_) => 5,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
