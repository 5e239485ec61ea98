use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("key file {path}: {msg}")]
    Key { path: PathBuf, msg: String },

    #[error("bench config {path}: {msg}")]
    Config { path: PathBuf, msg: String },

    #[error(transparent)]
    Core(#[from] cellmark::Error),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Image {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("{0} bench cell(s) failed")]
    BenchFailures(usize),
}

impl CliError {
    /// 2 for usage and validation problems, 1 for runtime failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Key { .. } | CliError::Config { .. } => 2,
            CliError::Core(cellmark::Error::Attack(_)) => 1,
            CliError::Core(_) => 2,
            CliError::Io { .. } | CliError::Image { .. } | CliError::Csv(_) => 1,
            CliError::BenchFailures(_) => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
