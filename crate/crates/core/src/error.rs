//! Error type shared across the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Error, Debug)]
pub enum Error {
    #[error("invalid kernel: {0}")]
    InvalidKernel(String),

    #[error("kernel radius must be nonnegative, got {0}")]
    NegativeRadius(f64),

    #[error(
        "kernel gradient is singular at a center (radial derivative has a nonzero limit at r = 0)"
    )]
    SingularKernelPoint,

    #[error("invalid node set: {0}")]
    InvalidNodes(String),

    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("{what} factorization failed (condition estimate {condition:.3e})")]
    Factorization { what: &'static str, condition: f64 },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("non-finite value encountered in {context} at {location:?}")]
    NonFinite {
        context: &'static str,
        location: Option<[f64; 2]>,
    },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("wave speed is zero; the CFL time step is unbounded")]
    ZeroWaveSpeed,

    #[error("solution blew up at t = {t:.6e} (stage {stage})")]
    BlowUp {
        t: f64,
        stage: usize,
        /// Last finite state, filled in by the trajectory driver.
        last: Option<Vec<f64>>,
    },

    #[error("exact-solution solver did not converge (residual {residual:.3e})")]
    OracleFailure { residual: f64 },

    #[error("unsupported domain: {0}")]
    UnsupportedDomain(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
