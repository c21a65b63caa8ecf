use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("matrix has determinant {det}, expected 1")]
    NotUnimodular { det: i128 },

    #[error("fundamental-domain reduction did not terminate within {0} steps")]
    ReductionDiverged(usize),

    #[error("enumeration truncated: complete only up to displacement {radius}")]
    Truncated { radius: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("tail bound {bound:e} exceeds tolerance {tol:e}")]
    TailBound { bound: f64, tol: f64 },

    #[error("error estimate {estimate:e} exceeds tolerance {tol:e}")]
    Accuracy { estimate: f64, tol: f64 },

    #[error("inconsistent data: {0}")]
    Inconsistent(String),

    #[error("integer overflow in {0}")]
    Overflow(&'static str),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
