use std::fmt::Display;

/// Failures of a command, split by exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad arguments, config or input files (exit 2).
    #[error("configuration error: {0}")]
    Config(String),
    /// Numerical failure inside the core (exit 1).
    #[error("numerical failure: {0}")]
    Numerical(#[from] cmc_core::Error),
    /// Output could not be written (exit 1).
    #[error("output error: {0}")]
    Output(String),
}

impl CliError {
    pub fn config(e: impl Display) -> Self {
        CliError::Config(e.to_string())
    }

    pub fn output(e: impl Display) -> Self {
        CliError::Output(e.to_string())
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) | CliError::Output(_) => 1,
        }
    }
}
