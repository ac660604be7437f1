use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the library and surfaced by the CLI.
#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed delimited input: {0}")]
    Csv(#[from] csv::Error),

    #[error("column {0} not found")]
    ColumnMissing(String),

    #[error("no parseable finite values in column {0}")]
    NoValues(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("search budget exceeded: {states} states > {budget}")]
    BudgetExceeded { states: u128, budget: u128 },

    #[error("artifact line {line}: {message}")]
    Artifact { line: usize, message: String },

    #[error("unknown density {0:?}")]
    UnknownDensity(String),

    #[error("benchmark config line {line}: {message}")]
    Config { line: usize, message: String },
}

impl Error {
    pub(crate) fn invalid(message: impl Into<String>) -> Self {
        Error::InvalidArgument(message.into())
    }

    /// Process exit code for this error: 2 usage, 3 data, 4 budget.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidArgument(_) | Error::UnknownDensity(_) | Error::Config { .. } => 2,
            Error::BudgetExceeded { .. } => 4,
            Error::Io { .. }
            | Error::Csv(_)
            | Error::ColumnMissing(_)
            | Error::NoValues(_)
            | Error::Artifact { .. } => 3,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
