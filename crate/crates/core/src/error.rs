use thiserror::Error;

/// Errors raised by the construction and verification pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("precision exhausted: {0}")]
    Precision(String),

    #[error("internal error: {0}")]
    Internal(String),

    #[error("not an eigenform: {0}")]
    NotEigenform(String),

    #[error("ill-conditioned basis: {0}")]
    IllConditionedBasis(String),

    #[error("ambiguous eigenvalue: {0}")]
    Ambiguity(String),

    #[error("prime {p} divides the conductor {conductor}")]
    RamifiedPrime { p: u64, conductor: i64 },

    #[error("search failed: {0}")]
    SearchFailure(String),

    #[error("malformed cache file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code used by the command line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Precision(_) => 3,
            Error::InvalidArgument(_)
            | Error::RamifiedPrime { .. }
            | Error::Format(_)
            | Error::Io(_)
            | Error::Json(_) => 4,
            _ => 2,
        }
    }
}

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}

pub(crate) fn precision<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Precision(msg.into()))
}
