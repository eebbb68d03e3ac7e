use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("score estimation exceeded its cap of {cap} plays")]
    EstimationTimeout { cap: u64 },

    /// The global play budget ran out. `partial` carries whatever trace the
    /// interrupted run had recorded, serialized as CSV rows.
    #[error("play budget of {budget} exhausted after {plays} plays")]
    BudgetExhausted {
        budget: u64,
        plays: u64,
        partial: Option<Box<crate::report::RunReport>>,
    },

    #[error("not found: {0}")]
    NotFound(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
