use thiserror::Error;

/// Errors produced by the composite construction pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CoreError {
    #[error("input contains a NaN or infinite entry")]
    NonFiniteInput,

    #[error("matrix must be at least 2x2, got {rows}x{cols}")]
    TooSmall { rows: usize, cols: usize },

    /// Column index is zero-based.
    #[error("column {0} has zero sample variance; standardization is undefined")]
    ZeroVarianceColumn(usize),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("not a valid correlation matrix: {0}")]
    InvalidCorrelation(String),

    #[error("invalid weight specification: {0}")]
    InvalidWeightSpec(String),

    #[error("matrix is still numerically singular after {ridge_applications} ridge application(s)")]
    SingularAfterRegularization { ridge_applications: u32 },

    #[error("composite variance is not positive (w'Rw or w'R^-1 w <= 0)")]
    DegenerateVariance,
}
