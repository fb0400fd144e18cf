use thiserror::Error;

/// Errors raised by the burst solvers and their inputs.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum BurstError {
    /// A value lies outside the domain of the model or operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Every terminal DP state has infinite score.
    #[error("infeasible: no level sequence has a finite score")]
    Infeasible,

    /// The requested problem exceeds a configured size guard.
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    /// Two sequences that must be paired have different lengths.
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
}

impl BurstError {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Self::Domain(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, BurstError>;
