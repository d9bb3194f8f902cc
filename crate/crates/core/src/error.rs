use thiserror::Error;

use crate::basis::BasisIndex;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("associated Legendre function P_{n}^{l} is undefined")]
    UndefinedIndex { n: u32, l: i32 },

    #[error("invalid basis index {0}")]
    InvalidIndex(BasisIndex),

    #[error("index out of range: {0}")]
    OutOfRange(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("no norm data for {0}")]
    MissingNorm(BasisIndex),

    #[error("bisection failed: {0}")]
    Bisection(String),
}

pub type Result<T> = std::result::Result<T, Error>;
