use thiserror::Error;

/// Errors raised across the toolbox.
///
/// Hypothesis failures are kept apart from internal errors so that callers
/// (and the command-line driver) can tell "the result does not apply here"
/// from "something is wrong with the computation".
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("empty set: {0}")]
    EmptySet(String),

    #[error("cone representation inconsistent: {0}")]
    InconsistentCone(String),

    #[error("dimension {dim} too high for internal double description (max {max}); supply dual generators")]
    DimensionTooHigh { dim: usize, max: usize },

    #[error("point not covered by any cell and no default cone: {0}")]
    Uncovered(String),

    #[error("overlapping cells carry different cones: cells {first} and {second}")]
    OverlappingCells { first: usize, second: usize },

    #[error("bisection bracket exhausted without locating a feasible level")]
    BracketExhausted,

    #[error("hypothesis failure: {0}")]
    Hypothesis(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("search space exceeds cap: {what} ({count} > {cap})")]
    CapExceeded {
        what: &'static str,
        count: usize,
        cap: usize,
    },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("schema error: {0}")]
    Schema(String),

    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }

    pub fn is_hypothesis_failure(&self) -> bool {
        matches!(self, Error::Hypothesis(_) | Error::Precondition(_))
    }
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
