use alloc::string::String;

use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = core::result::Result<T, DelocError>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum DelocError {
    /// Malformed input structure (missing degrees, wrong shapes, ...).
    #[error("schema error: {0}")]
    Schema(String),

    /// Argument outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// An improper integral or series did not reach its tolerance budget.
    #[error("convergence error: {detail} (partial value {partial}, tail estimate {tail:e})")]
    Convergence {
        partial: Complex64,
        tail: f64,
        detail: String,
    },

    /// A structural invariant of an input object does not hold.
    #[error("validation failed: {0}")]
    Validation(String),

    /// Evaluation of a rational function at a zero or pole.
    /// Evaluation at a pole of a rational function; `order` is the pole order.
    #[error("rational function has a pole of order {order} at z = {at}")]
    Pole { at: Complex64, order: i32 },

    /// Two independent routes disagree.
    #[error("consistency error: {detail} (difference {difference:e})")]
    Consistency { detail: String, difference: f64 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("numerical failure: {0}")]
    Numeric(String),
}

impl DelocError {
    pub fn is_convergence(&self) -> bool {
        matches!(self, DelocError::Convergence { .. })
    }
}
