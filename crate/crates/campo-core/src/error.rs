use thiserror::Error;

/// Errors surfaced by the exact kernel. Input-shaped problems (syntax,
/// violated side conditions) are distinguished from structural failures
/// (a value not matching the shape an operation requires).
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("syntax error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("invalid {family} parameters: {reason}")]
    Validation { family: String, reason: String },

    #[error("division by zero {0}")]
    DivisionByZero(String),

    #[error("expected a polynomial: {0}")]
    NotPolynomial(String),

    #[error("field is not of Riccati (u,v) shape: {0}")]
    NotRiccati(String),

    #[error("contraction shape does not match: {0}")]
    ShapeMismatch(String),

    #[error("unsupported family/parameter combination: {0}")]
    Unsupported(String),

    #[error("{0}")]
    Domain(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn validation(family: &str, reason: impl Into<String>) -> Self {
        Error::Validation { family: family.to_string(), reason: reason.into() }
    }
}
