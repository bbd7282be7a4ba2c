use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("ground-set mismatch: {left} vs {right}")]
    GroundSetMismatch { left: usize, right: usize },

    #[error("element {element} outside [1, {n}]")]
    ElementOutOfRange { element: usize, n: usize },

    #[error("invalid restriction system: {0}")]
    InvalidSystem(String),

    #[error("invalid condition: {0}")]
    InvalidCondition(String),

    #[error("{what} exceeds cap {cap}")]
    CapExceeded { what: String, cap: u64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("bound not applicable: {0}")]
    NotApplicable(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
