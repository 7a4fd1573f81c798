use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by the laboratory.
///
/// Configuration problems (`InvalidDomain`, `Spacing`, `InvalidParameter`, ...) are
/// distinguished from numerical failures (`NotConverged`, `ZeroPivot`, ...) so that
/// front ends can map them onto different exit codes via [`Error::is_usage`].
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("spacing {h} does not divide side `{side}` = {length}")]
    Spacing { side: &'static str, length: f64, h: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid forcing: {0}")]
    InvalidForcing(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("non-finite value at node {0}")]
    NonFinite(usize),

    #[error("operator is not symmetric (relative defect {0:e})")]
    Asymmetric(f64),

    #[error(
        "solver did not converge in {} iterations (relative residual {:e})",
        .0.iterations,
        .0.residual
    )]
    NotConverged(Box<NotConverged>),

    #[error("zero or negative pivot {value:e} at row {row}")]
    ZeroPivot { row: usize, value: f64 },

    #[error("value out of range: {0}")]
    Range(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

/// Best iterate carried out of a failed iterative solve.
#[derive(Debug, Clone)]
pub struct NotConverged {
    pub iterations: usize,
    pub residual: f64,
    pub best: Vec<f64>,
}

impl Error {
    /// True for errors caused by bad input rather than by the numerics.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::InvalidDomain(_)
                | Error::Spacing { .. }
                | Error::InvalidParameter(_)
                | Error::InvalidForcing(_)
                | Error::GridMismatch(_)
                | Error::Degenerate(_)
        )
    }
}
