use std::path::PathBuf;

use thiserror::Error;

use crate::point::Point;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("duplicate coordinates ({x}, {y}) shared by ids {first} and {second}")]
    DuplicatePoint { x: f64, y: f64, first: u64, second: u64 },

    #[error("duplicate point id {0}")]
    DuplicateId(u64),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("engine fault in round {round}: {reason}")]
    EngineFault { round: usize, reason: String },

    #[error("round limit of {limit} exceeded; protocol did not terminate")]
    RoundLimit { limit: usize },

    #[error("{path}: {message}")]
    Ingest { path: PathBuf, message: String },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn duplicate(a: &Point, b: &Point) -> Self {
        let (first, second) = if a.id <= b.id { (a.id, b.id) } else { (b.id, a.id) };
        Error::DuplicatePoint { x: a.x, y: a.y, first, second }
    }

    pub(crate) fn parameter(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }
}
