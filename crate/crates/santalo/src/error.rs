use thiserror::Error;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Exponents, dimensions or node counts outside the supported ranges.
    #[error("invalid argument: {0}")]
    Arg(String),

    /// A value left the domain where the requested quantity is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// Input was expected to be centrally symmetric and is not.
    #[error("symmetry error: {0}")]
    Symmetry(String),

    /// A hypothesis of the checked inequality failed on the supplied input.
    #[error("condition error: {0}")]
    Condition(String),

    /// The truncated domain does not capture enough mass.
    #[error("truncation error: {0}")]
    Truncation(String),

    /// An infimal convolution or conjugate is improper on the needed range.
    #[error("improper function: {0}")]
    Improper(String),

    /// A convex body is unbounded or does not contain the origin in its interior.
    #[error("unbounded body: {0}")]
    Unbounded(String),

    /// Second derivatives of a squared gauge are unavailable or blow up.
    #[error("smoothness error: {0}")]
    Smoothness(String),

    /// Dimension outside the supported range for the requested method.
    #[error("dimension error: {0}")]
    Dim(String),

    /// An iterative procedure exhausted its budget.
    #[error("no convergence: {0}")]
    Convergence(String),

    /// A suite configuration could not be parsed or validated.
    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn arg(msg: impl Into<String>) -> Error {
    Error::Arg(msg.into())
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
