use alloc::string::String;
use core::fmt;

use crate::SignVector;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An exhaustive computation would exceed its size limit.
    Budget {
        what: &'static str,
        limit: u64,
        requested: u64,
    },
    /// Caller violated a precondition (dimensions, ranges, domain).
    Contract(String),
    /// Some sign vector cannot be produced within the access limit.
    NotCovered { witness: SignVector, ell: usize },
    /// Malformed textual input.
    Parse(String),
}

impl Error {
    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    pub(crate) fn budget(what: &'static str, limit: u64, requested: u64) -> Self {
        Error::Budget {
            what,
            limit,
            requested,
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Budget {
                what,
                limit,
                requested,
            } => write!(f, "{what}: requested {requested} exceeds limit {limit}"),
            Error::Contract(msg) => write!(f, "contract violation: {msg}"),
            Error::NotCovered { witness, ell } => write!(
                f,
                "not a valid block construction at ell0 = {ell}: {witness} lies in no span of {ell} columns"
            ),
            Error::Parse(msg) => write!(f, "parse error: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
