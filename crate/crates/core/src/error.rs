use thiserror::Error;

use crate::multi::SolverTrace;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("unsupported dimension {0} (allowed 1..={max})", max = crate::hpd::MAX_DIM)]
    InvalidDimension(usize),

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix has a non-finite entry")]
    NonFinite,

    #[error("matrix is not Hermitian (asymmetry {asymmetry:e} exceeds {allowed:e})")]
    NotHermitian { asymmetry: f64, allowed: f64 },

    #[error("matrix is not positive definite (smallest eigenvalue {0:e})")]
    NotPositiveDefinite(f64),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("solver did not converge in {} iterations (last residual {:e})", .trace.iterations, .trace.last_residual())]
    NotConverged { trace: SolverTrace },
}

impl Error {
    /// True for failures of the numerics (as opposed to invalid input).
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Numerical(_) | Error::NotConverged { .. })
    }
}
