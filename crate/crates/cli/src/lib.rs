//! Library side of the `eppm` binary: configuration, subcommands, plotting.

pub mod commands;
pub mod config;
pub mod plot;

use eppm_core::Error;

/// Failure of a subcommand, carrying its process exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad flags, bad parameters, or a scheme that cannot be built (exit 2).
    #[error("{0}")]
    Usage(String),
    /// A requested design could not be constructed or verified (exit 3).
    #[error("{0}")]
    Construction(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) => 2,
            Self::Construction(_) => 3,
            Self::Io(_) | Self::Csv(_) => 1,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::NotFound { .. } | Error::VerificationFailed(_) | Error::TooLarge { .. } => {
                Self::Construction(e.to_string())
            }
            _ => Self::Usage(e.to_string()),
        }
    }
}
