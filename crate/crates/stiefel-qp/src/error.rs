//! Error type shared by all solver and oracle operations.

/// Errors produced by construction checks, solver configuration and the
/// iteration itself.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error("matrix must have at least one row and one column")]
    EmptyMatrix,

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("{context}: expected {expected_rows}x{expected_cols}, found {found_rows}x{found_cols}")]
    DimensionMismatch {
        context: &'static str,
        expected_rows: usize,
        expected_cols: usize,
        found_rows: usize,
        found_cols: usize,
    },

    #[error("matrix is not orthonormal: ||W^T W - I||_F = {error:.3e} exceeds tolerance {tol:.3e}")]
    NotOrthonormal { error: f64, tol: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("alpha = {alpha} does not make alpha*I - A positive definite")]
    NotPositiveDefinite { alpha: f64 },

    #[error("objective became non-finite at iteration {iteration}")]
    NonFiniteIteration { iteration: usize },
}

impl Error {
    pub(crate) fn dims(
        context: &'static str,
        expected: (usize, usize),
        found: (usize, usize),
    ) -> Self {
        Error::DimensionMismatch {
            context,
            expected_rows: expected.0,
            expected_cols: expected.1,
            found_rows: found.0,
            found_cols: found.1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
