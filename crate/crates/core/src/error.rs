use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("unknown name `{0}`")]
    UnknownName(String),

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error("invalid state space: {0}")]
    InvalidSpace(String),

    #[error("state space has {size} states, above the cap of {cap}")]
    SpaceTooLarge { size: u128, cap: u64 },

    #[error("map `{map}` cannot act on {space}")]
    Inapplicable { map: String, space: String },

    #[error("index {index} out of range for size {size}")]
    OutOfRange { index: u64, size: u64 },

    #[error("state does not belong to {0}")]
    NotInSpace(String),

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
