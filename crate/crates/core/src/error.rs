use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("register size unsupported: n={n} (expected 1..={max})")]
    RegisterSize { n: u32, max: u32 },

    #[error("dimension mismatch: expected {expected} entries, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("permutation is not a bijection on [0, {0})")]
    NotBijective(usize),

    #[error("pad database first: {0} elements is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("rank out of range: k={k}, valid range is 1..={n}")]
    RankOutOfRange { k: usize, n: usize },

    #[error("empty database")]
    EmptyDatabase,

    #[error("malformed database file: {0}")]
    MalformedFile(String),

    #[error("element outside declared domain: a_{index} = {value} not in [{min}, {max}]")]
    OutsideDomain {
        index: usize,
        value: f64,
        min: f64,
        max: f64,
    },

    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("domain too small for distinct draw: {count} values requested from {size}")]
    DistinctInfeasible { count: usize, size: u64 },

    #[error("operation requires an integer domain")]
    IntegerDomainRequired,

    #[error("operation requires a real domain")]
    RealDomainRequired,

    #[error("bracket not found after {0} attempts")]
    BracketNotFound(usize),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
