use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("solver failed: {0}")]
    Solver(volterra_core::Error),

    #[error("I/O failure on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    /// 1 invalid config, 2 solver non-convergence, 3 I/O failure.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 1,
            CliError::Solver(_) => 2,
            CliError::Io { .. } => 3,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

impl From<volterra_core::Error> for CliError {
    fn from(err: volterra_core::Error) -> Self {
        use volterra_core::Error as E;
        match err {
            E::NotConverged { .. } | E::Breakdown { .. } | E::Singular { .. } => CliError::Solver(err),
            other => CliError::Config(other.to_string()),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
