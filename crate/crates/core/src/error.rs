use alloc::string::String;
use core::fmt;

/// Errors produced by the core algorithms.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    EmptyDataset,
    /// Document-frequency filtering removed every term.
    EmptyVocabulary,
    /// Label vector length differs from the row count.
    LabelCountMismatch { rows: usize, labels: usize },
    /// A matrix was built from a buffer of the wrong length.
    BadShape { rows: usize, cols: usize, len: usize },
    DimensionMismatch { expected: usize, got: usize },
    NonFinite { row: usize, col: usize },
    TooFewRows { needed: usize, got: usize },
    /// More principal components requested than `min(N, M)`.
    TooManyComponents { requested: usize, max: usize },
    InvalidParameter(String),
    UnknownSampler(String),
    /// Exhaustive search refused because the instance is too large.
    SearchTooLarge { points: usize, k: usize },
    MixedCurveLengths { expected: usize, got: usize },
    IndexOutOfRange { index: usize, len: usize },
    MissingReference(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::EmptyDataset => f.write_str("empty dataset"),
            Error::EmptyVocabulary => f.write_str(
                "empty vocabulary: document-frequency limits removed every term (config too strict for corpus size)",
            ),
            Error::LabelCountMismatch { rows, labels } => {
                write!(f, "{labels} labels for {rows} rows")
            }
            Error::BadShape { rows, cols, len } => {
                write!(f, "buffer of length {len} cannot hold a {rows}x{cols} matrix")
            }
            Error::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected} columns, got {got}")
            }
            Error::NonFinite { row, col } => write!(f, "non-finite value at ({row}, {col})"),
            Error::TooFewRows { needed, got } => {
                write!(f, "need at least {needed} rows, got {got}")
            }
            Error::TooManyComponents { requested, max } => {
                write!(f, "{requested} components requested but at most {max} are available")
            }
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::UnknownSampler(id) => write!(
                f,
                "unknown sampler id {id:?}; valid ids: {}",
                crate::samplers::SAMPLER_IDS.join(", ")
            ),
            Error::SearchTooLarge { points, k } => write!(
                f,
                "exhaustive search over {points} points with k={k} exceeds the size guard (points <= 12 or k <= 6)"
            ),
            Error::MixedCurveLengths { expected, got } => {
                write!(f, "curves of different lengths: {expected} vs {got}")
            }
            Error::IndexOutOfRange { index, len } => {
                write!(f, "index {index} out of range for {len} rows")
            }
            Error::MissingReference(id) => write!(f, "reference sampler {id:?} has no results"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
