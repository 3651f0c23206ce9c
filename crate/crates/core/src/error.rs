use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("validation failed: {0}")]
    Validation(String),

    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("pair is not Fredholm: {0}")]
    NotFredholm(String),

    #[error("difference is not trace class on the tail: {0}")]
    NotTraceClass(String),

    #[error("nonzero index {index} obstructs unitary equivalence")]
    IndexObstruction { index: i64 },

    #[error("diagonal is not admissible: a-b misses an integer by {defect}")]
    DiagonalObstruction { defect: f64 },

    #[error("unsupported tail: {0}")]
    UnsupportedTail(String),

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("precondition failed: {0}")]
    PreconditionFailed(String),

    #[error("not a contraction: norm {norm}")]
    NotContraction { norm: f64 },

    #[error("operators do not commute: {0}")]
    NonCommuting(String),

    #[error("routes disagree: {0}")]
    RouteDisagreement(String),

    #[error("infinite cardinal arithmetic: {0}")]
    InfiniteArithmetic(String),

    #[error("schema error at `{field}`: {message}")]
    Schema { field: String, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn schema(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Schema {
            field: field.into(),
            message: message.into(),
        }
    }
}
