use thiserror::Error;

/// Errors raised by the library.
#[derive(Clone, Debug, PartialEq, Error)]
pub enum Error {
    #[error("parse error at offset {offset}: {message}")]
    Parse { offset: usize, message: String },
    #[error("unbound parameter `{name}` at offset {offset}")]
    UnboundParameter { name: String, offset: usize },
    #[error("degenerate map: {0}")]
    DegenerateMap(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("node budget exceeded: {needed} nodes requested, budget {budget}")]
    BudgetExceeded { needed: u128, budget: usize },
    #[error("inconclusive within horizon {horizon}: {reason}")]
    Inconclusive { horizon: usize, reason: String },
    #[error("series not summable: {0}")]
    NotSummable(String),
    #[error("degenerate transfer path: {0}")]
    DegeneratePath(String),
    #[error("test set {index} is not injective under the map: {reason}")]
    NotInjective { index: usize, reason: String },
    #[error("classification not provided: {0}")]
    Unsupported(String),
    #[error("insufficient depth: {0}")]
    InsufficientDepth(String),
    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
