//! Error taxonomy shared across the crate.

/// Crate-wide error type.
///
/// `Capacity` marks requests that exceed configured bounds (rank limits,
/// height bounds); callers may retry with larger limits. `Integrity` marks
/// conditions that theory rules out, so hitting one means a bad input or a
/// bug; it must never be swallowed.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("capacity: {0}")]
    Capacity(String),
    #[error("integrity: {0}")]
    Integrity(String),
    #[error("domain: {0}")]
    Domain(String),
    #[error("parse: {0}")]
    Parse(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn capacity(msg: impl Into<String>) -> Error {
        Error::Capacity(msg.into())
    }
    pub fn integrity(msg: impl Into<String>) -> Error {
        Error::Integrity(msg.into())
    }
    pub fn domain(msg: impl Into<String>) -> Error {
        Error::Domain(msg.into())
    }
}
