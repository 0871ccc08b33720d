use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("{0}")]
    Bound(entswap_core::Error),

    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },

    #[error("{0}")]
    Data(String),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }

    pub fn csv(e: csv::Error) -> Self {
        CliError::Data(e.to_string())
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Verification(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Bound(_) => 3,
            CliError::Io { .. } | CliError::Data(_) => 4,
        }
    }
}

impl From<entswap_core::Error> for CliError {
    fn from(e: entswap_core::Error) -> Self {
        use entswap_core::Error as E;
        match e {
            E::EnumerationBound { .. } => CliError::Bound(e),
            E::InvalidArgument(msg) => CliError::Usage(msg),
            other => CliError::Data(other.to_string()),
        }
    }
}
