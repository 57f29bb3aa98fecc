use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A probability vector failed its normalization or sign checks.
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    /// A matrix is not a valid two-qubit density matrix.
    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    /// Fit inputs do not determine the parameters.
    #[error("unidentifiable fit: {0}")]
    Unidentifiable(String),

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
