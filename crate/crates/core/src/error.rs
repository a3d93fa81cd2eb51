use thiserror::Error;

/// Failure modes shared by every stage of the pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Malformed or inconsistent input: bad parameters, kernel/grid mismatch,
    /// unknown config keys.
    #[error("configuration error: {0}")]
    Config(String),

    /// A region with zero measure or an inverted interval.
    #[error("invalid region: {0}")]
    InvalidRegion(String),

    /// The requested grid or matrix exceeds the node cap.
    #[error("capacity exceeded: {requested} nodes requested, cap is {cap}")]
    Capacity { requested: usize, cap: usize },

    /// An iterative routine failed to converge.
    #[error("numeric failure in {routine} at index {index}: {detail}")]
    Numeric {
        routine: &'static str,
        index: usize,
        detail: String,
    },

    /// The operation has no meaning for this kernel.
    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Process exit code used by the CLI.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::InvalidRegion(_) | Error::Unsupported(_) => 2,
            Error::Capacity { .. } => 3,
            Error::Numeric { .. } => 4,
            Error::Io(_) => 1,
        }
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
