use thiserror::Error;

use crate::fincat::Kind;

/// Errors raised by the categorical operations of this crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("mismatch: {0}")]
    Mismatch(String),

    #[error("instance mismatch: expected {expected:?}, found {found:?}")]
    KindMismatch { expected: Kind, found: Kind },

    #[error("invalid group table: {0}")]
    InvalidTable(String),

    #[error("map is not structure preserving at {0:?}")]
    NotHomomorphism(Vec<usize>),

    #[error("label {label} out of range for a carrier of size {size}")]
    OutOfRange { label: usize, size: usize },

    #[error("the {0:?} instance has no finite coproducts")]
    NoCoproduct(Kind),

    #[error("empty family passed to {0}")]
    EmptyFamily(&'static str),

    #[error("object too large to enumerate: {0}")]
    TooLarge(String),

    #[error("level {to} lies above level {from}")]
    LevelOrder { from: usize, to: usize },

    #[error("thread is known up to level {known} but level {needed} was requested")]
    ThreadTooShort { needed: usize, known: usize },

    #[error("precondition failed: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn mismatch(msg: impl Into<String>) -> Error {
    Error::Mismatch(msg.into())
}
