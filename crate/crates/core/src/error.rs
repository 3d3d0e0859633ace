use thiserror::Error;

/// Errors raised by state construction and analysis.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Operand shapes or local dimensions disagree.
    #[error("shape error: {0}")]
    Shape(String),

    /// Input lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Malformed state file or JSON payload.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn shape(msg: impl Into<String>) -> Error {
    Error::Shape(msg.into())
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
