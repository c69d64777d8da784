use thiserror::Error;

/// Errors raised by the solver library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument fell outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Two objects that must agree in size do not.
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    /// A direct factorization met a zero pivot.
    #[error("matrix is singular (zero pivot at row {row})")]
    Singular { row: usize },

    /// Quadrature did not reach the requested accuracy.
    #[error("quadrature did not converge: change {change:e} exceeds tolerance {tol:e}")]
    Quadrature { change: f64, tol: f64 },

    /// The predicted number of stored entries exceeds the configured cap.
    #[error("assembly would store {predicted} nonzeros, above the cap of {cap}")]
    MemoryBudget { predicted: usize, cap: usize },

    /// A Krylov iteration divided by a vanishing inner product twice in a row.
    #[error("iterative solver broke down after {iterations} iterations: {reason}")]
    Breakdown { iterations: usize, reason: String },

    /// The iteration budget ran out before the residual met the tolerance.
    #[error("iterative solver did not converge: residual {residual:e} after {iterations} iterations")]
    NotConverged { iterations: usize, residual: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
