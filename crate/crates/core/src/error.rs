use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error("invalid groupoid: {0}")]
    InvalidGroupoid(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("isotropy obstruction: arrow {arrow} has range = source but is not a unit")]
    IsotropyObstruction { arrow: String },

    #[error("exact angles required")]
    ExactAnglesRequired,

    #[error("cech data missing on triple overlap (i={i}, j={j}, k={k}, x={x})")]
    MissingCechValue { i: usize, j: usize, k: usize, x: usize },

    #[error("algebra tag mismatch: {0}")]
    TagMismatch(String),

    #[error("unknown unit index {0}")]
    UnknownUnit(usize),

    #[error("cocycle value at ({a}, {b}) is not a {k}-th root of unity")]
    NotRootOfUnity { a: String, b: String, k: u32 },

    #[error("mode window {window} does not cover modes {missing:?}")]
    WindowTooSmall { window: String, missing: Vec<i64> },

    #[error("proposition hypotheses not met: {0}")]
    HypothesesNotMet(String),

    #[error("internal consistency failure: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn parse(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            location: location.into(),
            message: message.into(),
        }
    }
}
