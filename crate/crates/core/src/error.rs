use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix has no rows")]
    EmptyMatrix,

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian (max |A - A*| entry = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not a projection (idempotency defect {defect:e})")]
    NotProjection { defect: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimMismatch { expected: usize, found: usize },

    #[error("dimension {dim} exceeds the cap {cap}")]
    DimOverflow { dim: usize, cap: usize },

    #[error("invalid interval: {0}")]
    BadInterval(String),

    #[error("exponent must satisfy p >= 1, got {0}")]
    BadExponent(f64),

    #[error("threshold must be a positive finite number, got {0}")]
    BadThreshold(f64),

    #[error("alpha must lie in the open interval (0, 1), got {0}")]
    BadAlpha(f64),

    #[error("eigensolver did not converge on a {dim}x{dim} matrix")]
    EigenFailure { dim: usize },

    #[error("empty family")]
    EmptyFamily,

    #[error("member {index} is not symmetric (distribution deviation {deviation:e})")]
    NotSymmetric { index: usize, deviation: f64 },

    #[error("hypothesis `{hypothesis}` failed (deviation {deviation:e})")]
    HypothesisFailed { hypothesis: String, deviation: f64 },

    #[error("probabilities of variable {variable} cannot be embedded on at most {cap} points")]
    NonUniformizable { variable: usize, cap: usize },

    #[error("invalid discrete variable {variable}: {reason}")]
    BadVariable { variable: usize, reason: String },

    #[error("sample space of size {size} exceeds the enumeration cap {cap}")]
    CapExceeded { size: u128, cap: u64 },
}
