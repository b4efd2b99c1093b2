use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid range: lo ({lo}) > hi ({hi}) or range wider than 2^63")]
    InvalidRange { lo: i64, hi: i64 },

    /// A configuration invariant was violated; `field` names the offending option.
    #[error("invalid `{field}`: {reason}")]
    Config { field: &'static str, reason: String },

    #[error("insufficient data: need at least {needed} values, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("sample size {got} outside supported range [{min}, {max}]")]
    SampleSizeOutOfRange { got: usize, min: usize, max: usize },

    #[error("degenerate input: {0}")]
    Degenerate(&'static str),

    #[error("support of {cells} cells exceeds budget of {budget}")]
    BudgetExceeded { cells: u64, budget: u64 },

    #[error("invalid output path `{}`", .0.display())]
    Path(PathBuf),

    #[error("malformed raw dump: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn config(field: &'static str, reason: impl Into<String>) -> Self {
        Error::Config { field, reason: reason.into() }
    }

    /// Process exit code for the CLI: 2 for configuration problems, 3 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io(_) | Error::Path(_) | Error::Json(_) | Error::Format(_) => 3,
            _ => 2,
        }
    }
}
