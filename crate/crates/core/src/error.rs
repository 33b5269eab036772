use thiserror::Error;

/// Errors raised by model construction, rate-function evaluation and simulation.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error(
        "tail assumption violated at state {state}, z = {z}: tail {tail:.6e} > bound {bound:.6e}"
    )]
    TailViolation {
        state: usize,
        z: u64,
        tail: f64,
        bound: f64,
    },

    #[error("oracle guard: {0}")]
    Guard(String),

    #[error("series did not reach the requested accuracy: {0}")]
    Truncation(String),

    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
