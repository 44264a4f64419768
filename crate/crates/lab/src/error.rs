use std::path::PathBuf;

use thiserror::Error;

/// Process exit status for the command-line front end.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExitStatus {
    Pass = 0,
    PropertyFailed = 1,
    Usage = 2,
    Numerical = 3,
}

#[derive(Debug, Error)]
pub enum LabError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("{path}: line {line}, column {column}: {message}")]
    MatrixFile {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Core(#[from] meanlab_core::Error),
}

impl LabError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        LabError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn exit_status(&self) -> ExitStatus {
        match self {
            LabError::Core(e) if e.is_numerical() => ExitStatus::Numerical,
            _ => ExitStatus::Usage,
        }
    }
}

pub type LabResult<T> = std::result::Result<T, LabError>;
