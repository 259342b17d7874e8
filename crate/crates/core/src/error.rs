use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("matrix dimension {0} must be even")]
    OddDimension(usize),

    #[error("matrix is not unitary (residual {residual:e})")]
    NotUnitary { residual: f64 },

    #[error("orthogonal matrix has determinant -1 (a reflection, not in SO(N))")]
    Reflection,

    #[error("eigenvalue iteration did not converge after {iterations} steps")]
    NoConvergence { iterations: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("sample too small: {got} < {needed}")]
    UndersizedSample { got: usize, needed: usize },

    #[error("expected count in bin {bin} is {expected}, need at least 5")]
    SparseBin { bin: usize, expected: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
