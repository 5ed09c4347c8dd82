use thiserror::Error;

/// Errors produced by the solver toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum GscoError {
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("index {index} out of range for dimension {dim}")]
    Range { index: usize, dim: usize },

    #[error("self-loop on node {node} (line {line})")]
    SelfLoop { node: usize, line: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("numeric failure at iteration {iter}: {msg}")]
    Numeric { iter: usize, msg: String },

    #[error("enumeration refused: dimension {dim} exceeds cap {cap}")]
    CapExceeded { dim: usize, cap: usize },

    #[error("degenerate direction: restricted vector has zero norm")]
    DegenerateDirection,

    #[error("io error: {0}")]
    Io(String),

    #[error("instance generation failed: {0}")]
    Generation(String),
}

pub type Result<T> = std::result::Result<T, GscoError>;

impl From<std::io::Error> for GscoError {
    fn from(e: std::io::Error) -> Self {
        GscoError::Io(e.to_string())
    }
}
