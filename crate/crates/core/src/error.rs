use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix must have positive dimensions, got {rows}x{cols}")]
    EmptyMatrix { rows: usize, cols: usize },

    #[error("expected {expected} entries for a {rows}x{cols} matrix, got {got}")]
    EntryCount {
        rows: usize,
        cols: usize,
        expected: usize,
        got: usize,
    },

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("shape mismatch in {op}: {left:?} vs {right:?}")]
    ShapeMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian (max asymmetry {max_asymmetry:e})")]
    NotHermitian { max_asymmetry: f64 },

    #[error("matrix is not positive semi-definite (lambda_min = {lambda_min:e})")]
    NotPsd { lambda_min: f64 },

    #[error("{0} failed to converge")]
    NoConvergence(&'static str),

    #[error("p = 0 is a rank count, not a norm; use numerical_rank")]
    ZeroExponent,

    #[error("invalid exponent: {0}")]
    InvalidExponent(String),

    #[error("invalid sample parameters: {0}")]
    InvalidSample(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("pivoted Cholesky breakdown at step {step}: pivot {pivot:e} is negative")]
    CholeskyBreakdown { step: usize, pivot: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
