use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Broad category of a failure, used by front ends to pick an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// Bad parameters supplied by the caller.
    Usage,
    /// Malformed or inconsistent input data.
    Data,
    /// A computation could not produce a result on otherwise valid data.
    Algorithm,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("duplicate {kind} id `{id}` (line {line})")]
    DuplicateId {
        kind: &'static str,
        id: String,
        line: usize,
    },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("unknown label `{0}`")]
    UnknownLabel(String),

    #[error("sample ids without a known class prefix: {}", .0.join(", "))]
    UnprefixedSamples(Vec<String>),

    #[error("degenerate computation: {0}")]
    Degenerate(String),

    #[error("no informative start: no single feature has a positive score")]
    NoInformativeStart,

    #[error("fold {fold} failed: {source}")]
    FoldFailed {
        fold: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::InvalidParameter(_) => ErrorClass::Usage,
            Error::Parse { .. }
            | Error::DuplicateId { .. }
            | Error::DimensionMismatch { .. }
            | Error::InsufficientData(_)
            | Error::UnknownLabel(_)
            | Error::UnprefixedSamples(_)
            | Error::Io(_)
            | Error::Json(_) => ErrorClass::Data,
            Error::Degenerate(_) | Error::NoInformativeStart => ErrorClass::Algorithm,
            Error::FoldFailed { source, .. } => source.class(),
        }
    }

    /// Short stable identifier for machine consumption.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Parse { .. } => "parse_error",
            Error::DuplicateId { .. } => "duplicate_id",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::InsufficientData(_) => "insufficient_data",
            Error::UnknownLabel(_) => "unknown_label",
            Error::UnprefixedSamples(_) => "unprefixed_samples",
            Error::Degenerate(_) => "degenerate",
            Error::NoInformativeStart => "no_informative_start",
            Error::FoldFailed { .. } => "fold_failed",
            Error::Io(_) => "io_error",
            Error::Json(_) => "json_error",
        }
    }
}
