use std::path::PathBuf;

use chrono::NaiveDate;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at row {row}: {message}")]
    Parse { row: usize, message: String },

    #[error("invalid bar on {date}: {message}")]
    InvalidBar { date: NaiveDate, message: String },

    #[error("duplicate date {0}")]
    DuplicateDate(NaiveDate),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("insufficient length: need at least {required}, got {actual}")]
    InsufficientLength { required: usize, actual: usize },

    #[error("degenerate labels: {0}")]
    DegenerateLabels(String),

    #[error("non-finite value in input")]
    NonFinite,

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("grid search failed for every combination: {0}")]
    GridSearch(String),

    #[error("insufficient meta history: {0}")]
    InsufficientMetaHistory(String),

    #[error("record store {path}: {message}")]
    Store { path: PathBuf, message: String },

    #[error("model persistence: {0}")]
    Persistence(String),

    #[error("instrument {instrument}: {source}")]
    Instrument {
        instrument: String,
        #[source]
        source: Box<Error>,
    },

    #[error("io error at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Coarse error classes, used by the CLI to pick an exit code.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorCategory {
    Input,
    Config,
    Model,
    Io,
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn for_instrument(instrument: impl Into<String>, source: Error) -> Self {
        Error::Instrument {
            instrument: instrument.into(),
            source: Box::new(source),
        }
    }

    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::Parse { .. }
            | Error::InvalidBar { .. }
            | Error::DuplicateDate(_)
            | Error::InsufficientLength { .. }
            | Error::NonFinite
            | Error::LengthMismatch { .. } => ErrorCategory::Input,
            Error::Config(_) | Error::Domain(_) => ErrorCategory::Config,
            Error::DegenerateLabels(_)
            | Error::GridSearch(_)
            | Error::InsufficientMetaHistory(_)
            | Error::Persistence(_) => ErrorCategory::Model,
            Error::Store { .. } | Error::Io { .. } => ErrorCategory::Io,
            Error::Instrument { source, .. } => source.category(),
        }
    }
}
