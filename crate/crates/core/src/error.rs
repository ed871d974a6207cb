use std::path::PathBuf;

use thiserror::Error;

/// Coarse classification of failures, used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Validation,
    Guard,
    Calibration,
    Internal,
    Io,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {what} (got {value})")]
    Domain { what: &'static str, value: f64 },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("dimension mismatch in {what}: expected {expected}, found {found}")]
    Dimension {
        what: String,
        expected: usize,
        found: usize,
    },

    #[error("unknown feature id `{id}` in {source_name} at row {row}")]
    UnknownFeature {
        id: String,
        source_name: String,
        row: usize,
    },

    #[error("{source_name}: invalid entry `{value}` at row {row}, column {col}: {reason}")]
    InvalidEntry {
        source_name: String,
        row: usize,
        col: usize,
        value: String,
        reason: String,
    },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("degenerate scale: every {0} median is zero")]
    DegenerateScale(&'static str),

    #[error("calibration failed for pair ({i}, {j}): {reason}")]
    Calibration { i: usize, j: usize, reason: String },

    #[error("solver guard: {0}")]
    Guard(String),

    #[error("factorization failed: {0}")]
    Factorization(String),

    #[error("{}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{stage}")]
    Stage {
        stage: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Domain { .. }
            | Error::Contract(_)
            | Error::Dimension { .. }
            | Error::UnknownFeature { .. }
            | Error::InvalidEntry { .. }
            | Error::Invalid(_)
            | Error::DegenerateScale(_)
            | Error::Json(_)
            | Error::Csv(_) => ErrorKind::Validation,
            Error::Guard(_) => ErrorKind::Guard,
            Error::Calibration { .. } => ErrorKind::Calibration,
            Error::Factorization(_) => ErrorKind::Internal,
            Error::Io { .. } => ErrorKind::Io,
            Error::Stage { source, .. } => source.kind(),
        }
    }

    /// Wraps the error with the name of the step that produced it.
    pub fn in_stage(self, stage: impl Into<String>) -> Self {
        Error::Stage {
            stage: stage.into(),
            source: Box::new(self),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
