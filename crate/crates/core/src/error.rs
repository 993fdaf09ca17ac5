use num_bigint::BigInt;
use thiserror::Error;

/// Which family admissibility condition failed at a prime.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Condition {
    /// v_q(z^r) > v_q(s^2)
    I,
    /// r does not divide v_q(s)
    II,
}

impl std::fmt::Display for Condition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Condition::I => write!(f, "(i) v_q(z^r) > v_q(s^2)"),
            Condition::II => write!(f, "(ii) r does not divide v_q(s)"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("condition {which} violated at q = {q}")]
    ConditionViolation { q: u64, which: Condition },
    #[error("singular: Δ = 0")]
    SingularCurve,
    #[error("could not factor {cofactor}: composite cofactor beyond trial-division bound {bound}")]
    Factorization { cofactor: BigInt, bound: u64 },
    #[error("relation does not hold: {0}")]
    RelationViolated(String),
    #[error("gcd condition violated: {0}")]
    GcdViolated(String),
    #[error("normalization violated: {0}")]
    NormalizationViolated(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("internal inconsistency: {0}")]
    Internal(String),
}

impl Error {
    /// Process exit code: 1 for internal inconsistencies, 2 for everything the caller supplied.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Internal(_) => 1,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

pub(crate) fn internal<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Internal(msg.into()))
}
