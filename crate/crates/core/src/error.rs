use thiserror::Error;

/// Errors raised by the factorization engine and the lab.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("invalid pivot set: {0}")]
    InvalidPivot(String),

    #[error("pivot index {index} out of range for order {n}")]
    PivotOutOfRange { index: usize, n: usize },

    #[error("diagonal entry {index} is not strictly positive ({value})")]
    NonPositiveDiagonal { index: usize, value: f64 },

    #[error("matrix is not positive definite (breakdown at step {step})")]
    NotPositiveDefinite { step: usize },

    #[error("matrix is singular to working precision")]
    Singular,

    #[error("matrix is not symmetric: entry ({row}, {col}) differs from its mirror")]
    NotSymmetric { row: usize, col: usize },

    #[error("local factorization broke down on pivot {pivot:?}: {reason}")]
    LocalBreakdown { pivot: Vec<usize>, reason: String },

    #[error("degenerate pair: |alpha| = {0} is too close to 1")]
    DegeneratePair(f64),

    #[error("columns are numerically rank deficient")]
    RankDeficient,

    #[error("zero column at index {0}")]
    ZeroColumn(usize),

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
