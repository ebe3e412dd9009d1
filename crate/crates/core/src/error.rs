use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum HardyError {
    /// NaN or infinite input, or an otherwise malformed argument.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Argument outside the domain where the operation is defined
    /// (for example `p < 2` where `p >= 2` is required).
    #[error("domain error: {0}")]
    Domain(String),

    /// A weight pair violates one of its structural requirements at `index`.
    #[error("invariant violated at n = {index}: {reason}")]
    InvariantViolation { index: usize, reason: String },

    /// A documented precondition on the test sequence does not hold.
    #[error("precondition failed: {0}")]
    Precondition(String),

    /// An iterative estimator ran out of evaluations before reaching the
    /// requested tolerance. The best bracket found so far is attached.
    #[error("evaluation budget of {evaluations} exhausted; best bracket [{lower}, {upper}]")]
    Budget {
        lower: f64,
        upper: f64,
        evaluations: usize,
    },

    /// A sum left the finite range of the scalar type.
    #[error("overflow: {0}")]
    Overflow(String),
}

impl HardyError {
    /// Short machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self {
            HardyError::InvalidInput(_) => "invalid_input",
            HardyError::Domain(_) => "domain",
            HardyError::InvariantViolation { .. } => "invariant_violation",
            HardyError::Precondition(_) => "precondition",
            HardyError::Budget { .. } => "budget",
            HardyError::Overflow(_) => "overflow",
        }
    }
}

pub type Result<T> = std::result::Result<T, HardyError>;
