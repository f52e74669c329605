use thiserror::Error;

/// Errors raised by the laboratory. Numerical degeneracies that the
/// experiments are meant to observe (singular matrices, `-inf` log
/// integrals) are returned as flagged values, not as errors.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("degenerate distribution: {0}")]
    Degenerate(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error(
        "eigensolver did not converge after {iterations} iterations \
         ({deflated} of {n} eigenvalues deflated)"
    )]
    NoConvergence {
        iterations: usize,
        deflated: usize,
        n: usize,
    },

    #[error("enumeration of {size} combinations exceeds cap {cap}")]
    CapExceeded { size: u128, cap: u128 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
