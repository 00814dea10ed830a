use thiserror::Error;

/// Errors raised by frame construction, transforms and the statistics harness.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("length {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("invalid frame: {0}")]
    InvalidFrame(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("coefficient index sets do not match")]
    IndexMismatch,

    #[error("iteration did not converge after {iterations} iterations")]
    NotConverged { iterations: usize },

    #[error("wavelet is not continuously differentiable: {0}")]
    NotDifferentiable(String),

    #[error("{0}")]
    Unsupported(String),

    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
