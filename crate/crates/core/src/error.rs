use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("zero is not a unit")]
    ZeroInput,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("field mismatch: {0}")]
    FieldMismatch(String),
    #[error("oracle depth {given} is below the required {required}")]
    InsufficientDepth { given: u32, required: u32 },
    #[error("unsupported tier: {0}")]
    UnsupportedTier(String),
    #[error("invalid datum: {0}")]
    InvalidDatum(String),
    #[error("degenerate Hilbert-90 witness: x = -1 in a field factor")]
    DegenerateWitness,
    #[error("datum is not regular")]
    NotRegular,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("c-sign convention mismatch")]
    ConventionMismatch,
    #[error("epsilon unavailable: {0}")]
    EpsilonUnavailable(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("mismatched component group: {0}")]
    GroupMismatch(String),
    #[error("sampling exhausted after {0} attempts")]
    SamplingExhausted(usize),
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
