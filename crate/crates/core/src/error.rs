use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid law parameters: {0}")]
    Parameter(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid kernel: {0}")]
    Validity(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("size limit exceeded: {0}")]
    Size(String),

    #[error("integer overflow: {0}")]
    Overflow(String),

    #[error("isolated vertex {0}: kernel cannot be symmetrized")]
    IsolatedVertex(usize),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
