//! Crate-wide error type.

use thiserror::Error;

/// Errors reported by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter failed validation. The message names the offending field.
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// A serialized artifact (construction file, frame file, CSV) failed to parse.
    #[error("parse error: {0}")]
    Parse(String),
    /// I/O failure while reading or writing an artifact.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
