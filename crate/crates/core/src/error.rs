use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("failed to parse scenario: {0}")]
    Parse(String),

    /// Names the offending field using its scenario-file key.
    #[error("invalid value for `{field}`: {reason}")]
    Validation { field: String, reason: String },

    #[error("unknown experimental condition {0} (expected 1, 2 or 3)")]
    UnknownCondition(u8),

    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(&'static str),

    #[error("range {range_m} m is outside the unambiguous range {max_m} m")]
    AmbiguousRange { range_m: f64, max_m: f64 },

    #[error("range bin {bin} out of bounds for {bins} bins")]
    BinOutOfRange { bin: usize, bins: usize },

    #[error("noiseless signal has zero mean power")]
    ZeroSignal,

    #[error("degenerate circle fit: {0}")]
    DegenerateFit(&'static str),

    #[error("{available} symbols cannot resolve velocity; need at least {required}")]
    InsufficientSymbols { available: usize, required: usize },

    #[error("phasor of frame {0} has zero magnitude")]
    MissingFrame(usize),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("invalid sweep: {0}")]
    InvalidSweep(String),

    #[error("malformed tensor dump: {0}")]
    MalformedDump(&'static str),

    #[error("{context}: {source}")]
    Frame {
        context: String,
        #[source]
        source: Box<Error>,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn validation(field: &str, reason: impl Into<String>) -> Self {
        Error::Validation {
            field: field.to_string(),
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Returns the field name for validation failures.
    pub fn field(&self) -> Option<&str> {
        match self {
            Error::Validation { field, .. } => Some(field),
            _ => None,
        }
    }
}
