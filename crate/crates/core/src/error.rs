use thiserror::Error;

/// Library-wide error type.
///
/// `CapExceeded` is deliberately separate from the validation variants: the
/// CLI maps it to exit code 2 (resource ceiling) while everything else maps
/// to exit code 1 (bad input or configuration).
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid tour: {0}")]
    InvalidTour(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("resource cap exceeded: {0}")]
    CapExceeded(String),

    #[error("empty sample set")]
    EmptySampleSet,

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code the CLI should use for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::CapExceeded(_) => 2,
            _ => 1,
        }
    }
}
