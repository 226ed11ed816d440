use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input: unsorted breakpoints, non-finite entries, bad lengths.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },

    /// Two operands live in different matrix models (dimension or trace weight differ).
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("singular value decomposition failed: {0}")]
    Decomposition(String),

    /// The quantity is not finite on this input (for example the support measure
    /// of a function with a nonzero tail).
    #[error("undefined on this input: {0}")]
    Undefined(String),

    #[error("constraint violated: {0}")]
    Constraint(String),

    #[error("transfer planning failed: {0}")]
    Plan(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub(crate) fn require_positive(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositive { name, value })
    }
}
