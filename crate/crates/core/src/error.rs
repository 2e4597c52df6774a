use thiserror::Error;

/// Errors produced by the core solver and model types.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("matrix must have at least one variable")]
    EmptyMatrix,

    #[error("matrix row {row} has length {len}, expected {expected}")]
    RaggedMatrix { row: usize, len: usize, expected: usize },

    #[error("temperature must be strictly positive, got {0}")]
    NonPositiveTemperature(f64),

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("objective index {index} out of range for {count} objective(s)")]
    ObjectiveOutOfRange { index: usize, count: usize },

    #[error("cannot normalise an all-zero matrix")]
    AllZeroMatrix,

    #[error("scalarisation weight {0} outside [0, 1]")]
    WeightOutOfRange(f64),

    #[error("correlation {0} outside [-1, 1]")]
    CorrelationOutOfRange(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degenerate normalisation bounds for objective {objective}: min {min} >= max {max}")]
    DegenerateBounds { objective: usize, min: f64, max: f64 },

    #[error("no points supplied")]
    EmptyInput,

    #[error("instance parse error at line {line}: {kind}")]
    Parse { line: usize, kind: ParseErrorKind },
}

/// Reason an instance file failed to parse.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseErrorKind {
    #[error("expected an integer, found `{0}`")]
    NotAnInteger(String),
    #[error("negative entry {0}")]
    NegativeEntry(i64),
    #[error("row has {found} entries, expected {expected}")]
    RowLength { expected: usize, found: usize },
    #[error("file ended before {0} was complete")]
    Truncated(&'static str),
    #[error("header value {0} must be at least 1")]
    BadHeader(i64),
    #[error("unexpected trailing data `{0}`")]
    TrailingData(String),
}

pub type Result<T> = std::result::Result<T, Error>;
