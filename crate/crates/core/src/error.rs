use thiserror::Error;

/// Errors raised by model construction, simulation and the experiment runner.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid block scheme: {0}")]
    Scheme(String),

    #[error("moment of order {requested} requested but the innovation law only has moments below {q_max}")]
    Moment { requested: f64, q_max: f64 },

    #[error("internal consistency error: {0}")]
    Consistency(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("invalid Monte Carlo configuration: {0}")]
    Config(String),

    #[error("empty sample")]
    Empty,

    #[error("quadrature failed: {0}")]
    Quadrature(String),

    #[error("insufficient precision: {0}")]
    Precision(String),

    #[error("validation failed with {} violation(s)", .0.len())]
    Validation(Vec<crate::experiment::Violation>),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("config parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
