use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid field: {0}")]
    InvalidField(String),

    #[error("shape mismatch: expected {expected:?}, got {actual:?}")]
    ShapeMismatch {
        expected: (usize, usize),
        actual: (usize, usize),
    },

    #[error("negative measured intensity {value} at pixel {index}")]
    NegativeMeasurement { index: usize, value: f64 },

    #[error("out of bounds: {0}")]
    OutOfBounds(String),

    #[error("cannot normalize by an all-zero {0}")]
    ZeroNormalization(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("pattern stack is empty")]
    EmptyStack,

    #[error("invalid config: {0}")]
    Config(String),

    #[error("checksum mismatch for {path}: manifest {expected}, payload {actual}")]
    Checksum {
        path: PathBuf,
        expected: String,
        actual: String,
    },

    #[error("malformed stack file: {0}")]
    Format(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("image error on {path}: {source}")]
    Image {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by bad user input rather than bad data.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::Config(_) | Error::InvalidParameter(_) | Error::OutOfBounds(_)
        )
    }
}
