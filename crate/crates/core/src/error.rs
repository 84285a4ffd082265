use thiserror::Error;

/// Errors raised by the verification library.
///
/// Mathematical disagreements are not errors: they are recorded as failed
/// checks in a report. Errors here mean the request itself was malformed or
/// could not be computed within the configured resources.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not an odd prime")]
    NotOddPrime(String),

    #[error("primes must be distinct, got p={p}, q={q}, r={r}")]
    NotDistinct { p: u64, q: u64, r: u64 },

    #[error("quartic symbol (2/p)_4 is only defined for p = 1 mod 8, got p={0}")]
    QuarticUndefined(u64),

    #[error("division by zero in Z[sqrt 2]")]
    DivisionByZero,

    #[error("{0} has negative norm, no totally positive associate exists")]
    NoTotallyPositiveAssociate(String),

    #[error("{0} is divisible by sqrt 2")]
    EvenElement(String),

    #[error("{0} is a square in Z[sqrt 2]")]
    SquareElement(String),

    #[error("{0} is not a fundamental discriminant")]
    NotFundamental(String),

    #[error("discriminant {disc} exceeds the configured bound {bound}")]
    DiscriminantBound { disc: String, bound: String },

    #[error("form {0} is not primitive")]
    ImprimitiveForm(String),

    #[error("discriminant mismatch: {0}")]
    DiscriminantMismatch(String),

    #[error("no ideal of norm {ell} in the field of discriminant {disc} ({ell} is inert)")]
    InertPrime { ell: u64, disc: String },

    #[error("class group too large: {0} classes")]
    ClassGroupTooLarge(usize),

    #[error("cannot factor {0} within the trial division bound")]
    FactorizationBound(String),

    #[error("invalid field: {0}")]
    InvalidField(String),

    #[error("inconsistent genus input: {0}")]
    GenusInconsistent(String),

    #[error("minkowski oracle refused: {0}")]
    OracleRefused(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("internal consistency failure: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
