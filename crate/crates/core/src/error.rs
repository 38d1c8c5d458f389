use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the set where the operation is defined.
    #[error("domain error: {0}")]
    Domain(String),
    /// An iterative numerical routine failed to produce a trustworthy answer.
    #[error("numeric error: {0}")]
    Numeric(String),
    /// The input is degenerate, e.g. a composition that vanishes identically.
    #[error("degenerate input: {0}")]
    Degenerate(String),
    /// No restart of the envelope search produced a domain-contained disc.
    #[error("infeasible: {0}")]
    Infeasible(String),
}

pub type Result<T> = std::result::Result<T, Error>;

macro_rules! domain_err {
    ($($arg:tt)*) => { $crate::error::Error::Domain(format!($($arg)*)) };
}
pub(crate) use domain_err;
