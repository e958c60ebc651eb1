use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid polynomial order: {0}")]
    InvalidOrder(String),

    #[error("non-finite input: {0}")]
    NonFinite(&'static str),

    #[error("first hypergeometric parameter {0} is not a non-positive integer")]
    NotPolynomial(f64),

    #[error("domain error: {0}")]
    Domain(String),

    /// No discrete spectrum exists for the requested parameters.
    #[error("degenerate problem: {0}")]
    Degenerate(String),

    #[error("no root found: {0}")]
    NoRoot(String),

    #[error("unsupported series order {0} (expected 1, 2 or 3)")]
    UnsupportedOrder(u32),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure_finite(x: f64, what: &'static str) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite(what))
    }
}
