use thiserror::Error;

/// Errors raised by the library.
///
/// `Refused` marks inputs that violate a mathematical precondition of the
/// requested operation; everything else is a usage or internal failure.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("unsupported group label `{0}`")]
    UnsupportedLabel(String),
    #[error("{what} exceeds the cap of {cap}")]
    CapExceeded { what: String, cap: u64 },
    #[error("invalid Galois data: {0}")]
    InvalidGamma(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("refused: {0}")]
    Refused(String),
    #[error("precision exhausted: {0}")]
    Precision(String),
    #[error("not invertible: {0}")]
    NotInvertible(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
