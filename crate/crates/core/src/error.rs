use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("range error: value {value} at index {index} is outside [{min}, {max}]")]
    Range {
        value: i32,
        index: usize,
        min: i32,
        max: i32,
    },

    #[error("parameter error: {0}")]
    Parameter(String),

    #[error("input error: {0}")]
    Input(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("scene spec error: {0}")]
    Spec(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("capture {capture_id}: {source}")]
    Capture {
        capture_id: String,
        #[source]
        source: Box<Error>,
    },

    #[error("png error in {path}: {message}")]
    Png { path: PathBuf, message: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn with_capture(self, capture_id: &str) -> Self {
        Error::Capture {
            capture_id: capture_id.to_string(),
            source: Box::new(self),
        }
    }
}
