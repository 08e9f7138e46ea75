use thiserror::Error;

/// Errors raised by the walk, the observables and the Floquet machinery.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum WalkError {
    /// A run was configured in a way that cannot be executed.
    #[error("configuration error: {0}")]
    Config(String),

    /// An input value violated a documented precondition.
    #[error("validation error: {0}")]
    Validation(String),

    /// Probability reached the edge of the stored lattice.
    #[error("lattice overflow at step {step}: boundary probability {leak:e} exceeds tolerance {tolerance:e}")]
    LatticeOverflow { step: u64, leak: f64, tolerance: f64 },

    /// The norm of the state drifted away from one.
    #[error("norm drift at step {step}: |norm - 1| = {drift:e}")]
    NormDrift { step: u64, drift: f64 },

    /// Least-squares fit could not be formed.
    #[error("fit error: {0}")]
    Fit(String),

    /// Overflow or non-finite values in a recursion.
    #[error("numeric error: {0}")]
    Numeric(String),

    /// A relation that holds by construction was violated.
    #[error("internal consistency error: {0}")]
    Consistency(String),
}

pub type Result<T> = std::result::Result<T, WalkError>;
