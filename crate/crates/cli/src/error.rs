use std::io;
use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("malformed hex block {input:?}: {reason}")]
    BadHex { input: String, reason: String },
    #[error("bad --threads value {0:?}: expected a positive integer or \"auto\"")]
    BadThreads(String),
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error(transparent)]
    Stdout(#[from] io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Core(#[from] aes_eqclass::Error),
    #[error("thread pool: {0}")]
    ThreadPool(#[from] rayon::ThreadPoolBuildError),
}

impl CliError {
    /// Usage errors exit with 2, like clap's own argument errors.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::BadHex { .. } | CliError::BadThreads(_) | CliError::Usage(_) => 2,
            _ => 1,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}
