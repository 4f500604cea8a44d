use thiserror::Error;

/// Errors raised by the exact algebra kernels.
///
/// Variants are split between bad input (the caller handed us something
/// malformed or out of range) and verification failures (an identity that
/// must hold exactly did not). The CLI maps the first group to exit code 2
/// and the second to exit code 1.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("cyclotomic orders {0} and {1} differ and lifting is disabled")]
    IncompatibleOrders(u64, u64),
    #[error("{j} is not a unit modulo {modulus}")]
    NotAUnit { j: u64, modulus: u64 },
    #[error("invalid precision {0}: must be between 1 and 15 digits")]
    InvalidPrecision(u32),
    #[error("group closure exceeded the cap of {cap} elements")]
    CapExceeded { cap: usize },
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("invalid multiplication table: {0}")]
    InvalidTable(String),
    #[error("group mismatch between operands")]
    GroupMismatch,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("invalid automorphism: {0}")]
    InvalidAutomorphism(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("character table computation failed: {0}")]
    CharacterTable(String),
    #[error("projection is not irreducible: {0}")]
    NotIrreducible(String),
    #[error("non-split field: {0}")]
    NonSplit(String),
    #[error("subgroup catalog incomplete: {0}")]
    IncompleteCatalog(String),
    #[error("chain too short: {0}")]
    ChainTooShort(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// True when the error signals a broken identity rather than bad input.
    pub fn is_verification_failure(&self) -> bool {
        matches!(self, Error::Verification(_) | Error::NotIrreducible(_))
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
