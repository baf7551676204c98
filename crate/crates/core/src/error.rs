use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error at token `{token}`: {reason}")]
    Parse { token: String, reason: String },

    #[error("points not in general position: {0}")]
    GeneralPosition(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid merge sequence at step {step}: {reason}")]
    InvalidStep { step: usize, reason: String },

    #[error("malformed {what}: {reason}")]
    Malformed { what: &'static str, reason: String },

    #[error("{what} of size {size} exceeds the cap of {cap}")]
    SizeCap {
        what: &'static str,
        size: usize,
        cap: usize,
    },

    #[error("f({r}) overflows 64-bit arithmetic")]
    Overflow { r: usize },

    #[error("density precondition failed: |M| = {points} but f(r)(p+q-2) = {bound}")]
    Density { points: usize, bound: u128 },

    #[error("internal inconsistency: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn parse_err(token: impl Into<String>, reason: impl Into<String>) -> Error {
    Error::Parse {
        token: token.into(),
        reason: reason.into(),
    }
}
