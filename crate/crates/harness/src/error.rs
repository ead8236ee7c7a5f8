use std::path::PathBuf;

use ramsia_core::CoreError;
use thiserror::Error;

/// Errors produced by the harness: file IO, parsing, spec validation, and
/// anything bubbling up from the solver core.
#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Strict CSV parse failure. `row` and `col` are 1-based.
    #[error("{path}: row {row}, column {col}: {message}")]
    Parse {
        path: PathBuf,
        row: usize,
        col: usize,
        message: String,
    },

    #[error("invalid specification: {0}")]
    InvalidSpec(String),

    #[error("serialization failed: {0}")]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Core(#[from] CoreError),
}

impl HarnessError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        HarnessError::Io { path: path.into(), source }
    }

    pub(crate) fn parse(
        path: impl Into<PathBuf>,
        row: usize,
        col: usize,
        message: impl Into<String>,
    ) -> Self {
        HarnessError::Parse { path: path.into(), row, col, message: message.into() }
    }
}
