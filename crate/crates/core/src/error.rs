use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("partitions have different weights ({0} vs {1})")]
    WeightMismatch(usize, usize),

    #[error("{what} of size {got} exceeds the supported maximum {max}")]
    Capacity {
        what: &'static str,
        got: usize,
        max: usize,
    },

    #[error("invalid dimension {got}: {reason}")]
    Dimension { got: usize, reason: &'static str },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("degenerate input: {0}")]
    Degenerate(&'static str),

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("orthogonality drift {drift:e} exceeds {limit:e}")]
    OrthogonalityDrift { drift: f64, limit: f64 },

    #[error("unsupported observable `{0}`")]
    UnsupportedObservable(String),

    #[error("unknown test function `{0}`")]
    UnknownFunction(String),

    #[error("outside hypothesis: {0}")]
    Hypothesis(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
