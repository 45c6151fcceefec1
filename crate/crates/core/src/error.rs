use alloc::string::String;
use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter combination violates a documented precondition.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// Input data violates an invariant (non-finite values, bad labels, ...).
    #[error("invalid data: {0}")]
    InvalidData(String),

    /// Two inputs that must agree in size do not.
    #[error("size mismatch: expected {expected}, got {got}")]
    SizeMismatch { expected: usize, got: usize },

    /// A state update produced a non-finite value.
    #[error("numerical divergence at vertex {vertex}")]
    Diverged { vertex: usize },

    /// The iterative eigensolver failed to reach the requested residual.
    #[error("eigensolver did not converge: {0}")]
    EigenNonConvergence(String),
}
