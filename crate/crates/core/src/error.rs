use std::path::PathBuf;

use thiserror::Error;

/// Errors raised anywhere in the planner library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid specification: {0}")]
    InvalidSpec(String),

    #[error("query ({x}, {y}) is outside the terrain domain")]
    OutOfDomain { x: f64, y: f64 },

    #[error("could not place {what} after {attempts} attempts")]
    Placement { what: String, attempts: usize },

    #[error("schema error in `{field}`: {reason}")]
    Schema { field: String, reason: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("start and target coincide; path length is undefined")]
    DegeneratePath,

    #[error("configuration error: {0}")]
    Config(String),

    #[error("schedule horizon T must be positive")]
    Schedule,

    #[error("population member {0} has not been evaluated")]
    NotEvaluated(usize),

    #[error("population too small: need {need}, have {have}")]
    PopulationTooSmall { need: usize, have: usize },

    #[error("selection has no candidates: {0}")]
    EmptySelection(String),

    #[error("encoding error: field `{field}` value {value} has no code in {width} bits")]
    Encoding { field: &'static str, value: String, width: u32 },

    #[error("malformed genome literal: {0}")]
    GenomeLiteral(String),

    #[error("planner already stopped: {0}")]
    Stopped(String),

    #[error("budget exhausted before the first evaluation completed")]
    BudgetExhausted,

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn schema(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Schema {
            field: field.into(),
            reason: reason.into(),
        }
    }
}
