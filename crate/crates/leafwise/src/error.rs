//! Error type shared by the whole crate.

use thiserror::Error;

/// Errors produced by constructors, kernels and checks.
#[derive(Debug, Error)]
pub enum Error {
    /// A caller violated a documented precondition (dimension mismatch,
    /// arity mismatch, parameter out of range).
    #[error("contract violation: {0}")]
    Contract(String),

    /// A pointwise evaluation failed (non-finite value, point outside the
    /// domain of a map, derivative order not available).
    #[error("evaluation error: {0}")]
    Evaluation(String),

    /// A domain sampler could not produce a point within its attempt budget.
    #[error("sampling error: {0}")]
    Sampling(String),

    /// A model constructor found one of its invariants violated.
    #[error("construction error: check `{check}` failed: {detail}")]
    Construction { check: String, detail: String },

    /// A run configuration could not be parsed or is inconsistent.
    #[error("config error: {0}")]
    Config(String),

    /// An epsilon sweep found no feasible value.
    #[error("sweep failure: {0}")]
    Sweep(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    pub fn evaluation(msg: impl Into<String>) -> Self {
        Error::Evaluation(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
