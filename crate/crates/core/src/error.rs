use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("outside domain: {0}")]
    Domain(String),
    #[error("non-finite value at step {step}")]
    Overflow { step: usize },
    #[error("newton did not converge: {0}")]
    NoConvergence(String),
    #[error("wrong period: expected {expected}, found {found}")]
    WrongPeriod { expected: usize, found: usize },
    #[error("derivative vanishes on the orbit")]
    Critical,
    #[error("singular construction: {0}")]
    Singular(String),
    #[error("search failed: {0}")]
    Search(String),
    #[error("precision exhausted: {0}")]
    Precision(String),
    #[error("ambiguous: {0}")]
    Ambiguous(String),
    #[error("underflow: {0}")]
    Underflow(String),
}

pub type Result<T> = std::result::Result<T, Error>;
