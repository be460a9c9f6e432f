use thiserror::Error;

/// Errors raised by the engine.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("unknown basis name `{0}`")]
    UnknownName(String),
    #[error("degree mismatch: {0}")]
    Degree(String),
    #[error("window violation: {0}")]
    Window(String),
    #[error("arity mismatch: expected {expected}, found {found}")]
    Arity { expected: usize, found: usize },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("elements or maps live over different bases")]
    BasisMismatch,
    #[error("not a complex: {0}")]
    NotAComplex(String),
    #[error("not a cocycle: {0}")]
    NotACocycle(String),
    #[error("not 1-connected: {0}")]
    NotOneConnected(String),
    #[error("class pullback failed in degree {degree}: {msg}")]
    Pullback { degree: i32, msg: String },
    #[error("{0}")]
    Invalid(String),
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line, msg: msg.into() }
    }

    /// True for failures caused by a truncation window that is too small.
    pub fn is_window(&self) -> bool {
        matches!(self, Error::Window(_) | Error::Pullback { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
