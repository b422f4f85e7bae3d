use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("field element {value} out of range for GF({q})")]
    ElementOutOfRange { value: u32, q: u32 },

    #[error("zero has no multiplicative inverse")]
    ZeroInverse,

    #[error("unsupported field extension degree {0} (expected 1..=8)")]
    UnsupportedField(u32),

    #[error("construction error: {0}")]
    Construction(String),

    #[error("overlap vector violates constraint `{chain}`")]
    ConstraintViolation { chain: &'static str },

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("invalid edge change at ({row}, {col}): {reason}")]
    InvalidEdgeChange {
        row: usize,
        col: usize,
        reason: &'static str,
    },

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("out of scope: {0}")]
    OutOfScope(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("pipeline stage `{stage}` failed: {message}")]
    Stage { stage: &'static str, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
