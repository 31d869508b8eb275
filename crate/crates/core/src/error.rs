use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the planning library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("unsupported format version: {0}")]
    Version(String),
    #[error("checksum mismatch")]
    Checksum,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("arc shape needs at least 3 units, got {0}")]
    ArcTooShort(usize),
    #[error("polygon exterior angle {exterior:.4} rad exceeds joint limit {limit:.4} rad")]
    InfeasiblePolygon { exterior: f64, limit: f64 },
    #[error("sampling budget of {0} attempts exhausted")]
    SamplingBudget(usize),
    #[error("start configuration is in collision")]
    InvalidStart,
    #[error("goal position is not free for the head unit")]
    InvalidGoal,
    #[error("planner mode {0} requires a random-shape roadmap")]
    MissingSrs(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    pub(crate) fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        Error::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}
