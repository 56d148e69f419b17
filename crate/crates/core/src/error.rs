use thiserror::Error;

/// Errors raised by the numerical kernels and the enumeration routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("no convergence: {0}")]
    NonConvergence(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("scales did not cancel: {0}")]
    Overflow(String),
    #[error("singular matrix")]
    SingularMatrix,
    #[error("invalid pair ({0}, {1})")]
    InvalidPair(i64, i64),
    #[error("iteration limit of {0} reached")]
    IterationLimit(usize),
    #[error("infeasible enumeration: {0}")]
    Feasibility(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("normalization error: {0}")]
    Normalization(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures of the numerics rather than of the input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::NonConvergence(_) | Error::Overflow(_) | Error::IterationLimit(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
