//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("series truncation too small: {0}")]
    Truncation(String),

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("point lies on the (shifted) theta divisor")]
    DivisorPoint,

    #[error("singular matrix in {0}")]
    SingularMatrix(&'static str),

    #[error("inhomogeneous expression: monomial `{0}` has weight {1}, monomial `{2}` has weight {3}")]
    Inhomogeneous(String, i64, String, i64),

    #[error("{0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub fn unsupported(msg: impl Into<String>) -> Self {
        Error::Unsupported(msg.into())
    }
}
