use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] divsamp_core::Error),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: line {line}: malformed CSV record: {message}")]
    Csv { path: PathBuf, line: u64, message: String },

    #[error("{path}: line {line}: malformed JSON: {message}")]
    Json { path: PathBuf, line: usize, message: String },

    #[error("{path}: missing column {column:?} (header has: {available})")]
    MissingColumn { path: PathBuf, column: String, available: String },

    #[error("{path}: line {line}: missing field {field:?}")]
    MissingField { path: PathBuf, line: usize, field: String },

    #[error("{path}: unsupported file extension (expected .csv, .jsonl or .json)")]
    UnknownFormat { path: PathBuf },

    #[error("environment variable {0} holding the API key is not set")]
    MissingApiKey(String),

    #[error("embedding request failed with HTTP {status}: {body}")]
    Http { status: u16, body: String },

    #[error("embedding request failed after {attempts} attempts: {message}")]
    Network { attempts: usize, message: String },

    #[error("bad embedding response: {0}")]
    Response(String),

    #[error("embedding dimension mismatch: {expected} vs {got}")]
    EmbeddingDimension { expected: usize, got: usize },

    #[error("corrupt cache entry {path}: {message}")]
    Cache { path: PathBuf, message: String },

    #[error("invalid configuration:\n  - {}", .0.join("\n  - "))]
    Config(Vec<String>),

    #[error("no successful runs ({0} failures)")]
    NoSuccessfulRuns(usize),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
