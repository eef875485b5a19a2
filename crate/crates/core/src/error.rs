use thiserror::Error;

/// Errors raised by the library. Mathematical outcomes such as singular
/// points or indeterminate evaluations are values, not errors.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not an odd prime below 2^63")]
    InvalidPrime(u64),
    #[error("mismatched primes {0} and {1}")]
    PrimeMismatch(u64, u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("gcd of two zero polynomials")]
    ZeroGcd,
    #[error("composition has an identically zero denominator")]
    DegenerateComposition,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("zero denominator in closed form for {0}")]
    ZeroDenominatorInFormula(String),
    #[error("no closed form for {0}")]
    NoClosedForm(String),
}

pub type Result<T> = std::result::Result<T, Error>;
