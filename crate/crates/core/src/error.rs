use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A model, environment file or experiment spec failed validation.
    #[error("invalid model: {0}")]
    InvalidModel(String),

    /// An argument outside its documented domain.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// An operation was called in a state that does not permit it
    /// (e.g. releasing a counter before the first append).
    #[error("invalid state: {0}")]
    InvalidState(String),

    /// Index or shape mismatch between cooperating structures.
    #[error("structural mismatch: {0}")]
    Structural(String),

    /// Private counts violate the positivity/consistency contract the planner relies on.
    #[error("private-count contract violated: {0}")]
    ContractViolation(String),

    #[error("failed to parse {path}: {source}")]
    Parse {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by user-supplied configuration rather than
    /// failures while running.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidModel(_) | Error::InvalidArgument(_) | Error::Parse { .. }
        )
    }
}
