use thiserror::Error;

/// Failure classes, each with its own process exit status.
#[derive(Debug, Error)]
pub enum CliError {
    /// Invalid configuration, caught before any compute.
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical abort: {0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }

    pub fn config(field: &str, err: impl std::fmt::Display) -> Self {
        CliError::Config(format!("{field}: {err}"))
    }
}

impl From<dkdv_core::Error> for CliError {
    /// Errors raised while computing. Validation maps its own errors to
    /// [`CliError::Config`] with the offending field.
    fn from(e: dkdv_core::Error) -> Self {
        CliError::Numerical(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
