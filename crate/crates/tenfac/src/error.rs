//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on shapes, ranks or values was violated.
    #[error("domain error: {0}")]
    Domain(String),

    /// A configurable resource limit (memory cap, thread pool) was exceeded.
    #[error("resource limit: {0}")]
    Resource(String),

    /// Malformed input file.
    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
