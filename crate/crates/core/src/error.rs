use thiserror::Error;

/// Errors raised anywhere in the synthesis, evaluation and inference stack.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),

    #[error("graph contains a cycle through `{0}`")]
    Cycle(String),

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("record {row} has zero probability under the model")]
    ZeroProbabilityRecord { row: usize },

    #[error("inconsistent evidence: {0} has probability zero under the model")]
    InconsistentEvidence(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }

    /// Process exit code used by the command line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Input(_) | Error::Cycle(_) | Error::Io(_) | Error::Csv(_) | Error::Json(_) => 2,
            Error::Numeric(_) | Error::ZeroProbabilityRecord { .. } => 3,
            Error::InconsistentEvidence(_) => 4,
        }
    }
}
