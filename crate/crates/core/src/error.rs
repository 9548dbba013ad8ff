use thiserror::Error;

/// Errors raised by the kernels, the quadrature engine and the harnesses.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation (t <= 0, p < 1, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// The caller violated a documented precondition.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A built object failed an independent self-check.
    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn require_positive_time(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("time must be positive and finite, got {t}")))
    }
}
