use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("chain dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("invalid filtration at arrow {index}: {reason}")]
    InvalidFiltration { index: usize, reason: String },

    #[error("illegal operation: {0}")]
    IllegalOp(String),

    #[error("operation {index} failed: {source}")]
    OpFailed {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Wraps an error with the index of the failing script step.
    pub fn at_op(self, index: usize) -> Error {
        Error::OpFailed { index, source: Box::new(self) }
    }
}
