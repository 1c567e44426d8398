use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected length {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("critical constants must be nonnegative and nondecreasing ({0})")]
    InvalidConstants(String),

    #[error("cannot rescale: the bound vector A·c is identically zero")]
    ZeroBound,

    #[error("floor constants are not feasible: max bound {max_bound} exceeds 1")]
    InfeasibleFloor { max_bound: f64 },

    #[error("linear program failed numerically: {0}")]
    NumericFailure(String),

    #[error("solve interrupted after {iterations} pivots")]
    Interrupted { iterations: usize },

    #[error("p-value {value} at position {position} is outside [0, 1]")]
    PValueOutOfRange { position: usize, value: f64 },

    #[error("invalid procedure: {0}")]
    InvalidProcedure(String),

    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors that come from the solver rather than from bad input.
    pub fn is_numeric(&self) -> bool {
        matches!(self, Error::NumericFailure(_) | Error::Interrupted { .. })
    }
}
