use std::path::Path;
use std::process::ExitCode;

use thiserror::Error;

use crate::config::ConfigError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(#[from] ConfigError),

    #[error("{0}")]
    Usage(String),

    /// The run stopped early; partial outputs and the manifest are on disk.
    #[error("run truncated: {0}")]
    Truncated(coadjoint::Error),

    #[error(transparent)]
    Core(#[from] coadjoint::Error),

    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }

    /// 2 for bad input, 3 for a truncated run, 1 otherwise.
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Config(_) | CliError::Usage(_) => ExitCode::from(2),
            CliError::Truncated(_) => ExitCode::from(3),
            _ => ExitCode::from(1),
        }
    }
}
