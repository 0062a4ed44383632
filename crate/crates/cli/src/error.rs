use std::io;
use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("{context}: {source}")]
    Numerical {
        context: String,
        #[source]
        source: sharpshock::Error,
    },

    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical { .. } => 3,
            CliError::Io { .. } => 1,
        }
    }

    /// Wraps a solver error; invalid parameters count as configuration errors.
    pub fn solver(context: impl Into<String>, source: sharpshock::Error) -> Self {
        use sharpshock::Error as E;
        match source {
            E::Config(_) | E::BadDomain { .. } | E::InvalidFlux(_) | E::InvalidKinetics(_) => {
                CliError::Config(format!("{}: {source}", context.into()))
            }
            _ => CliError::Numerical { context: context.into(), source },
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
