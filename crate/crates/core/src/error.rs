use thiserror::Error;

/// Errors raised anywhere in the solver pipeline.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("matrix is not positive definite (pivot {pivot} is not positive)")]
    NotPositiveDefinite { pivot: usize },
    #[error("invalid shape: {0}")]
    InvalidShape(String),
    #[error("points do not span the ambient space")]
    DegeneratePoints,
    #[error("input must be positive")]
    NonPositiveInput,
    #[error("matrix does not have full row rank (rank {rank}, expected {expected})")]
    RankDeficient { rank: usize, expected: usize },
    #[error("dimension mismatch: {0} vs {1}")]
    DimMismatch(usize, usize),
    #[error("vector {0:?} lies outside [-{1}, {1}]^k")]
    OutOfRange(Vec<i64>, u64),
    #[error("linear relaxation is infeasible")]
    LpInfeasible,
    #[error("linear relaxation is unbounded")]
    LpUnbounded,
    #[error("re-run with doubled eta disagrees: {0}")]
    EscalationMismatch(String),
    #[error("enumeration budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("ellipsoid iteration did not reach the requested certificate after {0} iterations")]
    MveeNotConverged(usize),
    #[error("reconstructed solution failed verification: {0}")]
    InvalidWitness(String),
    #[error("integer overflow: {0}")]
    Overflow(String),
}

pub type Result<T> = std::result::Result<T, Error>;
