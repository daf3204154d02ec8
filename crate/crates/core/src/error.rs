use thiserror::Error;

/// Errors raised by the core computations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// An argument lies outside the range an operation accepts.
    #[error("{name} = {value} is out of range: expected {expected}")]
    Domain {
        name: &'static str,
        value: String,
        expected: &'static str,
    },

    /// An operation that needs at least one element received none.
    #[error("{0} must not be empty")]
    Empty(&'static str),

    /// A frequency list was not strictly increasing.
    #[error("frequencies must be strictly increasing (violated at index {index})")]
    NotIncreasing { index: usize },

    /// A result that a theorem guarantees did not hold. Always a bug.
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    pub(crate) fn domain(name: &'static str, value: impl ToString, expected: &'static str) -> Self {
        Error::Domain {
            name,
            value: value.to_string(),
            expected,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
