use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// Shapes or block layouts that do not fit together.
    #[error("structural error: {0}")]
    Structural(String),

    #[error("insufficient data: need at least {needed} observations, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// The process (or candidate transition matrix) is not stable.
    #[error("unstable process: spectral radius {rho} >= 1")]
    Instability { rho: f64 },

    /// A truncated series did not meet its tail tolerance within `terms` terms.
    #[error("series truncation failed after {terms} terms (partial value {partial}, tail bound {tail_bound})")]
    Truncation {
        partial: f64,
        terms: usize,
        tail_bound: f64,
    },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures of the numerical kind (instability, truncation,
    /// non-convergence) as opposed to bad input or I/O.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Instability { .. } | Error::Truncation { .. } | Error::Numerical(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
