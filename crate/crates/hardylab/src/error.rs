use thiserror::Error;

/// Errors shared by all modules of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("point ({0}, {1}) is not strictly inside the domain")]
    DomainMembership(f64, f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("grid resolution too coarse: {0}")]
    Resolution(String),

    #[error("iteration did not converge: {msg}; best residuals {residuals:?}")]
    Convergence { msg: String, residuals: Vec<f64> },

    #[error("spectral truncation residual {residual:.3e} exceeds tolerance {tolerance:.3e}")]
    Truncation { residual: f64, tolerance: f64 },

    #[error("operation not applicable: {0}")]
    Inapplicable(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
