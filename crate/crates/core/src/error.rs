use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid local dimension {0}: must be at least 2")]
    InvalidDimension(usize),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("matrix is not Hermitian (max asymmetry {0:e})")]
    NotHermitian(f64),

    #[error("matrix is not unitary (max deviation {0:e})")]
    NotUnitary(f64),

    #[error("operator is not block diagonal in the (j' - j) mod d grading (off-block norm {0:e})")]
    NotBlockDiagonal(f64),

    #[error("enumeration of {required} deterministic strategies exceeds the limit of {limit}")]
    Capacity { required: u128, limit: u128 },

    #[error("no violation: Bell value {signal} does not exceed the local bound {bound}")]
    NoViolation { signal: f64, bound: f64 },

    #[error("eigensolver did not converge after {0} sweeps")]
    NoConvergence(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
