use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("dimension budget exceeded: {what} needs {requested}, limit is {limit}")]
    Budget {
        what: String,
        requested: usize,
        limit: usize,
    },

    #[error("schema violation: {0}")]
    Schema(String),

    #[error("reference error: {0}")]
    Reference(String),

    #[error("circuit is not unitary: {0}")]
    NonUnitary(String),

    #[error("unresolved oracle gate `{0}`")]
    UnresolvedOracle(String),

    #[error("count register saturated: {0}")]
    CountSaturation(String),

    #[error("copy register out of range: {0}")]
    CopyOverflow(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn dims(msg: impl Into<String>) -> Self {
        Error::DimensionMismatch(msg.into())
    }

    pub(crate) fn budget(what: impl Into<String>, requested: usize, limit: usize) -> Self {
        Error::Budget {
            what: what.into(),
            requested,
            limit,
        }
    }
}
