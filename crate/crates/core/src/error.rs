use thiserror::Error;

/// Errors produced by the toolkit.
///
/// Validation failures carry the measured violation so callers can report how
/// far off an input was, not just that it was rejected.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("matrix is not Hermitian: max |a[i,j] - conj(a[j,i])| = {deviation:e}")]
    Hermiticity { deviation: f64 },

    #[error("trace is {trace}, expected 1 (deviation {deviation:e})")]
    Trace { trace: f64, deviation: f64 },

    #[error("matrix is not positive semidefinite: minimum eigenvalue {min_eigenvalue:e}")]
    Positivity { min_eigenvalue: f64 },

    #[error("state is not pure: purity {purity} (deviation {deviation:e})")]
    Purity { purity: f64, deviation: f64 },

    #[error("state space too large: {0}")]
    Size(String),

    #[error("value out of range: {0}")]
    Range(String),

    #[error("geometry violation: {0}")]
    Geometry(String),

    #[error("invalid basis: {0}")]
    Basis(String),

    #[error(
        "outcome probability {probability:e} is below the zero threshold; reduced state undefined"
    )]
    ZeroProbabilityOutcome { probability: f64 },

    #[error("non-finite matrix entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("malformed matrix file: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
