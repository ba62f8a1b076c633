use thiserror::Error;

/// Errors raised by the engine.
#[derive(Debug, Error)]
pub enum Error {
    /// Bad user-facing configuration: unknown type tag, out-of-range threshold, ...
    #[error("configuration error: {0}")]
    Config(String),
    /// An argument outside the domain of the operation (e.g. a non-ideal).
    #[error("domain error: {0}")]
    Domain(String),
    /// Input data failed validation (e.g. a root set that is not crystallographic).
    #[error("validation error: {0}")]
    Validation(String),
    /// A computation would exceed a configured resource bound.
    #[error("resource error: {0}")]
    Resource(String),
    /// An internal invariant was violated. Always a bug.
    #[error("internal consistency error: {0}")]
    Internal(String),
    /// Memo database version mismatch or verdict conflict.
    #[error("database error: {0}")]
    Database(String),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
