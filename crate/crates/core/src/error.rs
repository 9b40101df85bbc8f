use thiserror::Error;

/// Errors raised by the set-family and counting routines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("universe mismatch: {left} vs {right}")]
    UniverseMismatch { left: usize, right: usize },

    #[error("element {element} outside universe [1..{universe}]")]
    ElementOutOfRange { element: usize, universe: usize },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("hypothesis not met: {0}")]
    Hypothesis(String),

    #[error("empty family")]
    EmptyFamily,

    #[error("vertex budget exceeded: C(n,k) = {vertices} > budget {budget}")]
    BudgetExceeded { vertices: u128, budget: u128 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParams(msg.into())
}

pub(crate) fn precondition(msg: impl Into<String>) -> Error {
    Error::Precondition(msg.into())
}
