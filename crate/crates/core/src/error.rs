use thiserror::Error;

/// Errors raised by the library.
///
/// The split between validation errors and numerical contract violations is
/// what the CLI maps onto exit codes 2 and 1 respectively.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("invalid Bratteli diagram: {0}")]
    InvalidDiagram(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("size cap exceeded: {0}")]
    CapExceeded(String),

    #[error("rank mismatch: {0}")]
    RankMismatch(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("contract violation: {0}")]
    ContractViolation(String),

    #[error("internal consistency failure: {0}")]
    InternalConsistency(String),

    #[error("rank-deficient frame at vertex {0}")]
    RankDeficient(usize),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors that signal a broken numerical contract rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::ContractViolation(_) | Error::InternalConsistency(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
