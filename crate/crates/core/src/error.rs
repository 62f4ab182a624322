use thiserror::Error;

/// Errors raised by the sampling, geometry, and exact-analysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid dimension {got}: {reason}")]
    InvalidDimension { got: usize, reason: &'static str },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("target is not reachable by the inverse map: {0}")]
    NotInvertible(String),

    #[error("invalid density: {0}")]
    InvalidDensity(String),

    #[error("singular evaluation: {0}")]
    Singularity(String),

    #[error("numeric failure: {0}")]
    Numeric(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
