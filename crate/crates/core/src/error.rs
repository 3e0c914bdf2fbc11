use thiserror::Error;

/// Errors raised by the exact-arithmetic, curve and descent layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A zero appeared where the operation needs a nonzero value.
    #[error("zero input: {0}")]
    Zero(&'static str),

    /// A point was handed to a curve it does not lie on.
    #[error("point {0} is not on the curve y^2 = x^3 + ({1})x")]
    NotOnCurve(String, String),

    /// Input outside the operation's domain (parity, coprimality, degenerate parameters...).
    #[error("{0}")]
    Domain(String),

    /// A witness failed exact substitution.
    #[error("witness check failed: {0}")]
    BadWitness(String),

    /// A certificate failed re-validation.
    #[error("invalid certificate: {0}")]
    Certificate(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
