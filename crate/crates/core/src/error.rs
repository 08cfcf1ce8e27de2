use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Failures that are not axiom violations.
///
/// Axiom violations are data and travel in a [`ValidationReport`]; this enum
/// is for inputs that cannot be checked at all (wrong shapes, broken
/// preconditions) and for searches that refuse to start.
///
/// [`ValidationReport`]: crate::ValidationReport
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("structural error: {0}")]
    Structural(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("search space too large: about {estimate} candidates, bound is {bound}")]
    SearchTooLarge { estimate: f64, bound: f64 },

    #[error("malformed document: {0}")]
    Document(String),

    /// A result that a proven theorem guarantees did not come out. Seeing one
    /// means a bug in this crate, not in the input.
    #[error("internal invariant broken: {0}")]
    Invariant(String),
}

impl Error {
    pub(crate) fn structural(msg: impl Into<String>) -> Self {
        Error::Structural(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }
}
