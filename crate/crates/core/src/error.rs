use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("invalid dimensions: {0}")]
    InvalidDims(String),

    #[error("permutation file line {line}, column {column}: {message}")]
    PermParse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("atom file line {line}: {message}")]
    AtomParse { line: usize, message: String },

    #[error("no atoms")]
    NoAtoms,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid cluster configuration: {0}")]
    Cluster(String),

    #[error("unsupported topology: {0}")]
    UnsupportedTopology(String),

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
