use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix is singular")]
    Singular,
    #[error("result is not integral: {0}")]
    NonIntegral(String),
    #[error("graph is disconnected")]
    Disconnected,
    #[error("unknown vertex: {0}")]
    UnknownVertex(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("resource guard tripped: {0}")]
    ResourceGuard(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("search bound exhausted: {0}")]
    SearchExhausted(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

impl Error {
    /// Stable machine-readable code for CLI error objects.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Dimension(_) => "dimension",
            Error::Singular => "singular",
            Error::NonIntegral(_) => "non_integral",
            Error::Disconnected => "disconnected",
            Error::UnknownVertex(_) => "unknown_vertex",
            Error::Precondition(_) => "precondition",
            Error::ResourceGuard(_) => "resource_guard",
            Error::Unsupported(_) => "unsupported",
            Error::SearchExhausted(_) => "search_exhausted",
            Error::Parse { .. } => "parse",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
