//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum BhError {
    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("tuple is inadmissible: every residue class mod {0} is covered")]
    Inadmissible(u64),

    #[error("cannot order tuple: duplicate polynomials")]
    OrderingImpossible,

    #[error("model kind `{kind}` has no Bernoulli inclusion probability")]
    KindMismatch { kind: &'static str },

    #[error("range [{lo}, {hi}] exceeds the membership budget of {budget}")]
    RangeTooLarge { lo: u64, hi: u64, budget: u64 },

    #[error("invalid threshold profile: {0}")]
    ProfileInvalid(String),

    #[error("integrand out of domain: {0}")]
    DomainError(String),

    #[error("invalid configuration: {0}")]
    ConfigError(String),

    #[error("cache I/O: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, BhError>;
