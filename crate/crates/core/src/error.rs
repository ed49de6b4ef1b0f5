use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Broad error class, stable across releases. The CLI maps these onto exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ErrorKind {
    Schema,
    Integrity,
    Capacity,
    Shape,
    Format,
    UndefinedMetric,
    Label,
    Spec,
    Io,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("schema error: {0}")]
    Schema(String),
    #[error("integrity error: {0}")]
    Integrity(String),
    #[error("capacity error: {0}")]
    Capacity(String),
    #[error("shape error: {0}")]
    Shape(String),
    #[error("format error in {}: {message}", path.display())]
    Format { path: PathBuf, message: String },
    #[error("undefined metric: {0}")]
    UndefinedMetric(String),
    #[error("label error: {0}")]
    Label(String),
    #[error("spec error: {0}")]
    Spec(String),
    #[error("i/o error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Schema(_) => ErrorKind::Schema,
            Error::Integrity(_) => ErrorKind::Integrity,
            Error::Capacity(_) => ErrorKind::Capacity,
            Error::Shape(_) => ErrorKind::Shape,
            Error::Format { .. } => ErrorKind::Format,
            Error::UndefinedMetric(_) => ErrorKind::UndefinedMetric,
            Error::Label(_) => ErrorKind::Label,
            Error::Spec(_) => ErrorKind::Spec,
            Error::Io { .. } => ErrorKind::Io,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
