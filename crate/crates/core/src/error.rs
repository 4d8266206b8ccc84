use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unknown ring `{0}` (expected qq, zz or fp:<prime>)")]
    UnknownRing(String),
    #[error("{0} is not a prime")]
    NotPrime(String),
    #[error("modulus {0} is too large (must be below 2^31)")]
    ModulusTooLarge(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("{0} is not invertible in {1}")]
    NotInvertible(String, String),

    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("generator index {index} out of range for rank {rank}")]
    IndexOutOfRange { index: i64, rank: usize },
    #[error("bad coefficient `{0}`")]
    BadCoefficient(String),

    #[error("rank mismatch: {0} vs {1}")]
    RankMismatch(usize, usize),
    #[error("ring mismatch: {0} vs {1}")]
    RingMismatch(String, String),
    #[error("N must be at least 1, got {0}")]
    BadN(usize),

    #[error("tensors of different ranks in one span")]
    MixedRanks,
    #[error("tensors over different rings in one span")]
    MixedRings,
    #[error("degree {degree} exceeds the maximal degree {max_degree}")]
    DegreeOutOfRange { degree: usize, max_degree: usize },
    #[error("incompatible spans: {0}")]
    IncompatibleSpans(String),
    #[error("subalgebra generators must not have a degree-0 component")]
    GeneratorsInDegreeZero,
    #[error("{size} coordinates exceed the cap of {cap}")]
    TooLarge { size: u128, cap: usize },

    #[error("ring {0} is not supported here: {1}")]
    UnsupportedRing(String, String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
