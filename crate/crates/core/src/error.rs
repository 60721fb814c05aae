use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("point outside domain on axis {axis}: {value} not in [{lower}, {upper}]")]
    Domain {
        axis: usize,
        value: f64,
        lower: f64,
        upper: f64,
    },

    #[error("dimension mismatch: expected {expected} coordinates, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("function `{function}` does not support n = {n}")]
    Arity { function: &'static str, n: usize },

    #[error("index {index} out of range for grid of {len} points")]
    Index { index: usize, len: usize },

    #[error("grid of {requested} points exceeds the in-memory limit of {limit} points")]
    Capacity { requested: u128, limit: usize },

    #[error("cannot sample from an empty set")]
    EmptySet,

    #[error("invalid box: {0}")]
    InvalidDomain(String),

    #[error("invalid configuration for `{field}`: {reason}")]
    Config { field: &'static str, reason: String },

    #[error("unknown {kind} `{name}`")]
    UnknownName { kind: &'static str, name: String },

    #[error("malformed oracle cache: {0}")]
    Cache(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn config(field: &'static str, reason: impl Into<String>) -> Self {
        Error::Config {
            field,
            reason: reason.into(),
        }
    }

    /// True for errors caused by user-supplied settings rather than I/O.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Config { .. }
                | Error::UnknownName { .. }
                | Error::Arity { .. }
                | Error::Capacity { .. }
                | Error::InvalidDomain(_)
        )
    }
}
