use std::process::ExitCode;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Usage(_) => 2,
            CliError::Verification(_) => 3,
            CliError::Io(_) => 4,
        })
    }

    /// Flag-driven core failures are usage errors; the rest are numeric.
    pub fn from_config(e: rbs_core::Error) -> Self {
        use rbs_core::Error as E;
        match e {
            E::InvalidDimension { .. } | E::InvalidInput(_) | E::InvalidDensity(_) => {
                CliError::Usage(e.to_string())
            }
            _ => CliError::Verification(e.to_string()),
        }
    }

    pub fn io(path: &std::path::Path, e: impl std::fmt::Display) -> Self {
        CliError::Io(format!("{}: {e}", path.display()))
    }
}

impl From<rbs_core::Error> for CliError {
    fn from(e: rbs_core::Error) -> Self {
        CliError::Verification(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
