use thiserror::Error;

/// Failures, each mapped to one process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("assertion failed: {0}")]
    Assertion(String),
    #[error("{0}")]
    Budget(String),
    #[error("{0}")]
    Library(qpurify::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Assertion(_) | CliError::Library(_) | CliError::Io(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Budget(_) => 3,
        }
    }
}

impl From<qpurify::Error> for CliError {
    fn from(e: qpurify::Error) -> Self {
        match e {
            qpurify::Error::Budget { .. } => CliError::Budget(e.to_string()),
            // bad input files are the caller's mistake
            qpurify::Error::Schema(_) | qpurify::Error::Reference(_) | qpurify::Error::UnresolvedOracle(_) => {
                CliError::Usage(e.to_string())
            }
            e => CliError::Library(e),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
