use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("empty set passed to {0}")]
    EmptySet(&'static str),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// An internal invariant did not hold. Seeing this means a bug upstream.
    #[error("contract breach: {0}")]
    ContractBreach(String),
    #[error("instance exceeds the oracle budget: {0}")]
    OverBudget(String),
}

pub type Result<T> = std::result::Result<T, Error>;
