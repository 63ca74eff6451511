use thiserror::Error;

/// Errors raised by instance construction, planning and evaluation.
#[derive(Debug, Error)]
pub enum QueryError {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("domain error: {0}")]
    DomainError(String),

    #[error("invalid plan: {0}")]
    InvalidPlan(String),

    #[error("value {value} is not in the support of variable {index}")]
    InvalidRealization { index: usize, value: f64 },

    #[error("{what}: size {size} exceeds limit {limit}")]
    SizeLimit {
        what: &'static str,
        size: f64,
        limit: f64,
    },

    #[error("knapsack enumeration would visit up to {candidates} subsets of large items")]
    BudgetTooFine { candidates: f64 },

    #[error("operation requires variant {expected}, instance is {found}")]
    VariantMismatch {
        expected: crate::model::Variant,
        found: crate::model::Variant,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, QueryError>;
