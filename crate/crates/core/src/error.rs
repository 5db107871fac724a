use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid flux p/q = {p}/{q}: {reason}")]
    InvalidFlux { p: i64, q: i64, reason: String },

    #[error("matrix flagged Hermitian has imaginary residue {residual:.3e} above tolerance {tolerance:.3e}")]
    NotHermitian { residual: f64, tolerance: f64 },

    #[error("Chambers fit residual {residual:.3e} exceeds tolerance {tolerance:.3e}")]
    FitResidual { residual: f64, tolerance: f64 },

    #[error("coupling coefficients are not proportional to a common polynomial (mismatch {mismatch:.3e})")]
    CouplingStructure { mismatch: f64 },

    #[error("companion root finding failed: {0}")]
    CompanionRoots(String),

    #[error("subprincipal decomposition check failed: error {error:.3e} above {tolerance:.3e}")]
    SubprincipalDecomposition { error: f64, tolerance: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("linear algebra backend error: {0}")]
    Linalg(#[from] ndarray_linalg::error::LinalgError),
}

pub type Result<T> = std::result::Result<T, Error>;
