use std::path::PathBuf;

use ifreg::IfrError;
use thiserror::Error;

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}:{line}:{column}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },

    #[error("{0}")]
    Input(String),

    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },

    #[error(transparent)]
    Model(#[from] IfrError),
}

impl CliError {
    pub fn parse(path: impl Into<PathBuf>, line: usize, column: usize, message: impl Into<String>) -> Self {
        CliError::Parse {
            path: path.into(),
            line,
            column,
            message: message.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// 2 for anything the caller can fix in the input, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. } | CliError::Input(_) | CliError::Io { .. } => 2,
            CliError::Model(e) => match e {
                IfrError::Dimension(_)
                | IfrError::InvalidInput(_)
                | IfrError::LengthMismatch { .. }
                | IfrError::RankDeficient { .. }
                | IfrError::OutOfBall { .. }
                | IfrError::InvalidWeights { .. } => 2,
                _ => 3,
            },
        }
    }
}
