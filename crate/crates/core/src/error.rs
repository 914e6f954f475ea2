use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("field too large: C(n-1, k-1) = {binomial} needs more than 2^30 elements")]
    FieldOverflow { binomial: u128 },

    #[error("polynomial {poly:#x} is not an irreducible polynomial of degree {m}")]
    InvalidPolynomial { m: u32, poly: u64 },

    #[error("extension degree {0} outside 1..=30")]
    InvalidDegree(u32),

    #[error("value {value:#x} is not an element of GF(2^{m})")]
    ElementOutOfRange { value: u64, m: u32 },

    #[error("zero has no multiplicative inverse")]
    ZeroInverse,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("index {index} out of range (bound {bound})")]
    IndexOutOfRange { index: usize, bound: usize },

    #[error("{what}: size {size} exceeds limit {limit}")]
    TooLarge {
        what: &'static str,
        size: u128,
        limit: u128,
    },

    #[error("construction failed: {0}")]
    ConstructionFailed(String),

    #[error("column balancing stalled: no legal move from deficit column {deficit} to surplus column {surplus}")]
    BalanceStall { deficit: usize, surplus: usize },

    #[error("support matrix cannot reach distance {target}: {ell} rows covered by fewer columns ({columns:?})")]
    StructurallyInfeasible {
        target: usize,
        ell: usize,
        columns: Vec<usize>,
    },

    #[error("gave up after {attempts} attempts; last failure: {last}")]
    RetriesExhausted { attempts: u32, last: String },

    #[error("linear system is singular")]
    Singular,

    #[error("insufficient symbols: have {have}, need {need}")]
    InsufficientSymbols { have: usize, need: usize },

    #[error("position {position} does not belong to bucket {bucket}")]
    WrongBucket { position: usize, bucket: usize },

    #[error("available columns have rank {rank} < {k}")]
    RankDeficient { rank: usize, k: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("verification failed: {0}")]
    VerificationFailed(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
