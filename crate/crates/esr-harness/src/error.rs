use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    /// Bad arguments, unreadable config, or an invalid pairing; callers
    /// should exit with status 2.
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    /// Failure while an experiment was already running; exit status 1.
    #[error("runtime error: {0}")]
    Runtime(String),
}

impl HarnessError {
    pub fn exit_code(&self) -> u8 {
        match self {
            HarnessError::Config(_) => 2,
            HarnessError::Io { .. } | HarnessError::Runtime(_) => 1,
        }
    }
}
