//! Error type shared by the whole crate.

/// Errors returned by solvers, generators and the sweep engine.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Malformed input: bad dimensions, non-finite values, out-of-range
    /// parameters.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The rate target cannot be met by any power allocation on this
    /// instance (e.g. every channel gain is zero).
    #[error("infeasible: {0}")]
    Infeasible(String),
}

pub type Result<T> = std::result::Result<T, Error>;
