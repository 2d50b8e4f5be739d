use thiserror::Error;

/// Everything that can go wrong in the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("p = 2 is not supported; the residual characteristic must be odd")]
    EvenPrime,
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("division by zero")]
    DivisionByZero,
    #[error("prime mismatch: {0} vs {1}")]
    PrimeMismatch(u64, u64),
    #[error("expected a p-adic unit, got valuation {0}")]
    NotAUnit(i64),
    #[error("expected a p-adic integer, got valuation {0}")]
    NotIntegral(i64),
    #[error("logarithm of zero")]
    LogOfZero,
    #[error("{0} is divisible by p = {1}")]
    DivisibleByP(i64, u64),
    #[error("residue-field element is zero")]
    ZeroResidue,
    #[error("insufficient precision: need at least {needed}, have {have}")]
    InsufficientPrecision { needed: i64, have: i64 },
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("unit part is not in Z_p: {0}")]
    NotInZp(String),
    #[error("character error: {0}")]
    Character(String),
    #[error("embedding error: {0}")]
    Embedding(String),
    #[error("{0} is not a negative fundamental discriminant")]
    NotFundamental(i64),
    #[error("prime {p} is not split in Q(sqrt({d}))")]
    NotSplit { d: i64, p: u64 },
    #[error("no generator of norm {0} found within the search bound")]
    GeneratorNotFound(String),
    #[error("group-ring datum invalid: {0}")]
    InvalidDatum(String),
    #[error("non-integral group-ring element")]
    NonIntegral,
    #[error("guardrail exceeded: {0}")]
    Guardrail(String),
    #[error("series truncation too small: need n_max >= {needed}, have {have}")]
    Truncation { needed: usize, have: usize },
    #[error("unknown calibration {0:?}")]
    UnknownCalibration(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("oracle inconsistency: {0}")]
    Oracle(String),
}

pub type Result<T> = std::result::Result<T, Error>;
