use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("shape mismatch: expected {expected}, found {found}")]
    Shape { expected: String, found: String },
    #[error("resource cap exceeded: {what} needs {requested}, cap is {cap}")]
    Resource { what: String, requested: usize, cap: usize },
    #[error("numerical degeneracy at k = {k}{}: {detail}", .r.map(|r| format!(", r = {r}")).unwrap_or_default())]
    Degenerate { k: usize, r: Option<usize>, detail: String },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("cache format: {0}")]
    Cache(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn shape(expected: impl ToString, found: impl ToString) -> Error {
    Error::Shape { expected: expected.to_string(), found: found.to_string() }
}
