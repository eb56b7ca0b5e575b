use fgs_core::FgsError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Unattainable(String),
    #[error("cross-check failed: {0}")]
    CrossCheck(String),
    #[error("{0}")]
    Core(FgsError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Unattainable(_) => 3,
            CliError::CrossCheck(_) => 4,
            CliError::Core(_) | CliError::Io(_) => 1,
        }
    }
}

impl From<FgsError> for CliError {
    fn from(e: FgsError) -> Self {
        match e {
            FgsError::InvalidInput(msg) => CliError::Config(msg),
            e @ FgsError::UnattainableEnergy { .. } => CliError::Unattainable(e.to_string()),
            e => CliError::Core(e),
        }
    }
}
