use thiserror::Error;

use crate::presentation::ParseError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("{0} is not an odd prime")]
    InvalidPrime(u64),

    #[error("presentation has no fixed prime; supply one at load time")]
    PrimeNotFixed,

    #[error("missing value for parameter `{0}`")]
    MissingParameter(String),

    #[error("unknown catalog entry `{0}`")]
    UnknownEntry(String),

    #[error("catalog entry `{0}` has no printed presentation")]
    NotLoadable(String),

    #[error("invalid presentation: {0}")]
    Invalid(String),

    #[error("presentation is inconsistent: {0}")]
    Inconsistent(String),

    #[error("collection budget exceeded after {0} rewrite steps")]
    CollectionBudget(u64),

    #[error("enumeration budget exceeded: {needed} elements requested, limit {limit}")]
    EnumerationBudget { needed: u64, limit: u64 },

    #[error("tail coefficient overflow")]
    TailOverflow,

    #[error("nilpotency class {0} exceeds the supported bound")]
    ClassTooLarge(usize),

    #[error("sampled commuting pairs cannot be used to decide a multiplier")]
    SampledStrategy,

    #[error("tail quotient has free rank {found}, expected {expected}")]
    FreeRankMismatch { expected: usize, found: usize },

    #[error("{0}")]
    Defect(String),
}

impl Error {
    /// Budget and defect errors, as opposed to bad input.
    pub fn is_budget_or_defect(&self) -> bool {
        matches!(
            self,
            Error::CollectionBudget(_)
                | Error::EnumerationBudget { .. }
                | Error::TailOverflow
                | Error::FreeRankMismatch { .. }
                | Error::Defect(_)
                | Error::Inconsistent(_)
        )
    }
}
