use std::io;
use std::path::PathBuf;

use thiserror::Error;
use vpseval_core::ErrorKind;

/// Process exit statuses.
pub mod exit {
    pub const OK: i32 = 0;
    pub const FAILURE: i32 = 1;
    pub const MANIFEST: i32 = 2;
    pub const UNDEFINED_METRIC: i32 = 3;
    pub const MALFORMED_DATA: i32 = 4;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("manifest error: {0}")]
    Manifest(String),
    #[error("invalid spec {}: {message}", path.display())]
    SpecFile { path: PathBuf, message: String },
    #[error("video {video}: {source}")]
    Video {
        video: String,
        #[source]
        source: vpseval_core::Error,
    },
    #[error(transparent)]
    Core(#[from] vpseval_core::Error),
    #[error("report {}: {message}", path.display())]
    Report { path: PathBuf, message: String },
    #[error("cannot write {}: {source}", path.display())]
    Output {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Manifest(_) | CliError::SpecFile { .. } => exit::MANIFEST,
            CliError::Video { source, .. } | CliError::Core(source) => {
                core_exit_code(source.kind())
            }
            CliError::Report { .. } => exit::MALFORMED_DATA,
            CliError::Output { .. } => exit::FAILURE,
        }
    }
}

fn core_exit_code(kind: ErrorKind) -> i32 {
    match kind {
        ErrorKind::Spec => exit::MANIFEST,
        ErrorKind::UndefinedMetric => exit::UNDEFINED_METRIC,
        ErrorKind::Schema
        | ErrorKind::Integrity
        | ErrorKind::Capacity
        | ErrorKind::Shape
        | ErrorKind::Format
        | ErrorKind::Label
        | ErrorKind::Io => exit::MALFORMED_DATA,
    }
}

pub type CliResult<T> = Result<T, CliError>;
