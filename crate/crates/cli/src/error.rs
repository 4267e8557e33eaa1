//! CLI failures and their exit codes.

use stokesfem::Error;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("verification failed: {0} claim(s) did not hold")]
    Verification(usize),

    #[error(transparent)]
    Core(#[from] Error),

    #[error("cannot write {path}: {source}")]
    Output {
        path: String,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Verification(_) => 1,
            CliError::Config(_) | CliError::Output { .. } => 3,
            CliError::Core(Error::InvalidConfig(_) | Error::Parse(_)) => 3,
            CliError::Core(_) => 2,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
