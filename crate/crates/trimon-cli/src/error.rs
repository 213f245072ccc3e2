use thiserror::Error;
use trimon_core::CoreError;

/// CLI failure classes and their process exit codes.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),

    #[error("config: {0}")]
    Config(String),

    #[error("numerical: {0}")]
    Numerical(#[from] CoreError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }

    pub fn config_io(path: &std::path::Path, err: impl std::fmt::Display) -> Self {
        CliError::Config(format!("{}: {err}", path.display()))
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
