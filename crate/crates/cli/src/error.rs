use std::path::PathBuf;

use jpegqim_core::jpeg::JpegError;
use jpegqim_core::metrics::MetricsError;
use jpegqim_core::qim::ParamError;
use jpegqim_core::stego::StegoError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{}: {source}", path.display())]
    Jpeg { path: PathBuf, source: JpegError },
    #[error(transparent)]
    Stego(#[from] StegoError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Params(#[from] ParamError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("stego output failed verification: {0}")]
    Verification(String),
    #[error("{0}")]
    Other(String),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> CliError {
        let path = path.into();
        move |source| CliError::Io { path, source }
    }

    pub fn jpeg(path: impl Into<PathBuf>) -> impl FnOnce(JpegError) -> CliError {
        let path = path.into();
        move |source| CliError::Jpeg { path, source }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Jpeg { source, .. } => match source {
                JpegError::MalformedStream(_) => 3,
                JpegError::UnsupportedJpeg(_) => 4,
                JpegError::EncodingOverflow { .. } => 8,
            },
            CliError::Stego(StegoError::InsufficientCapacity { .. }) => 5,
            CliError::Stego(StegoError::LengthOutOfRange { .. }) => 6,
            CliError::Metrics(MetricsError::DimensionMismatch(..)) => 7,
            _ => 1,
        }
    }
}
