use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Why a line of a text file was rejected.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseErrorKind {
    #[error("expected {expected} comma-separated fields, found {found}")]
    FieldCount { expected: usize, found: usize },
    #[error("field {field} is not a number")]
    NotANumber { field: usize },
    #[error("non-finite value in field {field}")]
    NonFinite { field: usize },
    #[error("nonpositive extent")]
    NonpositiveExtent,
    #[error("negative duration")]
    NegativeDuration,
    #[error("empty file")]
    Empty,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("parse error at line {line}: {kind}")]
    Parse { line: usize, kind: ParseErrorKind },
    #[error("invalid box ({x}, {y}, {w}, {h}): extents must be finite and positive")]
    InvalidBox { x: f64, y: f64, w: f64, h: f64 },
    #[error("length mismatch: expected {expected} frames, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("ground truth has no frame with a visible target")]
    NoVisibleFrame,
    #[error("no trajectory for sequence `{0}`")]
    MissingSequence(String),
    #[error("unknown attribute code `{0}`")]
    UnknownAttribute(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
    #[error("empty input: {0}")]
    EmptyInput(&'static str),
    #[error("box lies outside the {width}x{height} image")]
    BoxOutOfBounds { width: u32, height: u32 },
}
