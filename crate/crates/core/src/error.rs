use thiserror::Error;

/// Errors raised by the approximation, coupling and simulation routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("numerical instability at index {index}: residual {residual:e}")]
    Numerical { index: u64, residual: f64 },
    #[error("insufficient data: need at least {needed} samples, got {got}")]
    InsufficientData { needed: usize, got: usize },
    #[error("invalid distribution: {0}")]
    Validation(String),
    #[error("kernel error: {0}")]
    Kernel(String),
    #[error("proposal efficiency cap exceeded after {attempts} attempts")]
    Efficiency { attempts: u64 },
    #[error("unsupported dimension {0}")]
    UnsupportedDimension(usize),
    #[error("problem too large: {0}")]
    Size(String),
    #[error("internal consistency violation: {0}")]
    Internal(String),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn precondition(msg: impl Into<String>) -> Error {
    Error::Precondition(msg.into())
}
