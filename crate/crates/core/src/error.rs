use thiserror::Error;

use crate::design::VerificationReport;

/// Errors produced by design construction, codebook building, and analysis.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid design parameters ({q}, {k}, {lambda}): {reason}")]
    InvalidParams {
        q: usize,
        k: usize,
        lambda: usize,
        reason: &'static str,
    },
    #[error("{0} is not prime")]
    NotPrime(usize),
    #[error("{0} is not congruent to 3 mod 4")]
    WrongResidueClass(usize),
    #[error("{0} is not the smaller of a twin-prime pair")]
    NotTwinPrimes(usize),
    #[error("no difference set found for ({q}, {k}, {lambda})")]
    NotFound { q: usize, k: usize, lambda: usize },
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("difference set failed verification: {0}")]
    VerificationFailed(VerificationReport),
    #[error("codebook of {size} codewords exceeds the cap of {cap}")]
    TooLarge { size: u128, cap: u128 },
    #[error("expected {expected} bits, got {actual}")]
    BadLength { expected: usize, actual: usize },
    #[error("symbol index {index} out of range (m = {m})")]
    IndexOutOfRange { index: usize, m: usize },
    #[error("operation not supported for scheme {0}")]
    SchemeMismatch(crate::constellation::Scheme),
    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("target {target} not bracketed by the search interval")]
    NotBracketed { target: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
