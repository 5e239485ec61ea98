use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid rule {0}: must be in 0..=255")]
    InvalidRule(u32),

    #[error("invalid key: {0}")]
    InvalidKey(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("not a permutation: {0}")]
    NotBijective(String),

    #[error("insufficient capacity: payload needs {needed} samples, carrier has {available}")]
    Capacity { needed: usize, available: usize },

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("reference watermark has no set bits")]
    UndefinedReference,

    #[error("attack failed: {0}")]
    Attack(String),
}
