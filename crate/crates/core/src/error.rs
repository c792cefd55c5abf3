use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("arity mismatch: {left} vs {right}")]
    ArityMismatch { left: usize, right: usize },

    #[error("arity {n} is out of range for {what} (allowed {min}..={max})")]
    ArityOutOfRange {
        what: &'static str,
        n: usize,
        min: usize,
        max: usize,
    },

    #[error("not a monotone function: {0}")]
    NotMonotone(String),

    #[error("{0} is not below {1}")]
    NotOrdered(String, String),

    #[error("{tt} is not an element of D_{n}")]
    NotMember { n: usize, tt: String },

    #[error("invalid permutation: {0:?}")]
    InvalidPermutation(Vec<u8>),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("format error: {0}")]
    Format(String),

    #[error("checkpoint mismatch: {0}")]
    Checkpoint(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn arity(what: &'static str, n: usize, min: usize, max: usize) -> Self {
        Error::ArityOutOfRange { what, n, min, max }
    }

    /// True for failures caused by files on disk rather than by arguments.
    pub fn is_io_or_format(&self) -> bool {
        matches!(self, Error::Io(_) | Error::Format(_) | Error::Checkpoint(_))
    }
}
