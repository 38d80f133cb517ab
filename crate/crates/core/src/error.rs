use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("domain too small: operation needs radius {needed}, ball has radius {radius}")]
    DomainTooSmall { radius: usize, needed: usize },

    #[error("invalid generator {0:?}: expected a signed unit vector")]
    InvalidGenerator(Vec<i64>),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("unsupported dimension {0}: must lie in 1..={max}", max = crate::limits::MAX_DIMENSION)]
    UnsupportedDimension(usize),

    #[error("precondition violated, input is not harmonic: {0}")]
    NotHarmonic(String),

    #[error("index {index} outside the available range 0..={max}")]
    OutOfRange { index: u64, max: u64 },

    #[error("resource limit exceeded: {cells} lattice cells requested, limit is {limit} (set HARM_MAX_CELLS to raise it)")]
    ResourceLimit { cells: u128, limit: u128 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("theorem hypothesis not met: {0}")]
    HypothesisNotMet(String),

    #[error("hypothesis violated at {point:?}: {reason}")]
    HypothesisViolation { point: Vec<i64>, reason: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),
}
