use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error at line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("config error: {0}")]
    Usage(String),

    #[error("{path}: {message}")]
    Input { path: PathBuf, message: String },

    #[error("cannot write to {path}: {source}")]
    Output {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Core(#[from] commlab::Error),

    #[error("{0}")]
    NonConvergence(String),
}

impl CliError {
    /// 2 for bad input or configuration, 3 for a failed check, 4 when a
    /// numerical routine did not converge.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } | CliError::Usage(_) | CliError::Input { .. } | CliError::Output { .. } => 2,
            CliError::NonConvergence(_) => 4,
            CliError::Core(e) => match e {
                commlab::Error::NonConvergence { .. } => 4,
                commlab::Error::Construction { .. } | commlab::Error::Verification { .. } => 3,
                commlab::Error::Shape(_) | commlab::Error::Domain(_) | commlab::Error::Parse { .. } => 2,
            },
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;

pub(crate) fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(CliError::Usage(msg.into()))
}
