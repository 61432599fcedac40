//! Dense matrix value types with construction-time invariants.
//!
//! All three types are immutable after construction, so they can be shared
//! and sent across threads freely.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Default Frobenius-norm tolerance for the orthonormality check of
/// [`StiefelMatrix`].
pub const DEFAULT_ORTHO_TOL: f64 = 1e-8;

/// A dense real matrix with at least one row, one column, and finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    inner: DMatrix<f64>,
}

impl DenseMatrix {
    pub fn new(inner: DMatrix<f64>) -> Result<Self> {
        if inner.nrows() == 0 || inner.ncols() == 0 {
            return Err(Error::EmptyMatrix);
        }
        if !inner.iter().all(|x| x.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { inner })
    }

    /// Builds a matrix from row-major entries.
    pub fn from_rows(rows: usize, cols: usize, entries: &[f64]) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::dims(
                "row-major entry buffer",
                (rows, cols),
                (entries.len(), 1),
            ));
        }
        Self::new(DMatrix::from_row_slice(rows, cols, entries))
    }

    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        Self::new(DMatrix::zeros(rows, cols))
    }

    pub fn rows(&self) -> usize {
        self.inner.nrows()
    }

    pub fn cols(&self) -> usize {
        self.inner.ncols()
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.inner
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.inner
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.inner.norm()
    }
}

/// A symmetric real matrix. Inputs are symmetrized as `(A + A^T) / 2` on
/// construction; a silently asymmetric input is the most common caller bug
/// and the quadratic form is only well-posed for symmetric `A`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix {
    inner: DMatrix<f64>,
}

impl SymmetricMatrix {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        if matrix.nrows() == 0 {
            return Err(Error::EmptyMatrix);
        }
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::dims(
                "symmetric matrix must be square",
                (matrix.nrows(), matrix.nrows()),
                (matrix.nrows(), matrix.ncols()),
            ));
        }
        if !matrix.iter().all(|x| x.is_finite()) {
            return Err(Error::NonFinite);
        }
        let sym = (&matrix + matrix.transpose()) * 0.5;
        Ok(Self { inner: sym })
    }

    /// Builds the matrix from row-major entries of a square matrix.
    pub fn from_rows(dim: usize, entries: &[f64]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::dims(
                "row-major entry buffer",
                (dim, dim),
                (entries.len(), 1),
            ));
        }
        Self::new(DMatrix::from_row_slice(dim, dim, entries))
    }

    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        if diag.is_empty() {
            return Err(Error::EmptyMatrix);
        }
        Self::new(DMatrix::from_diagonal(&nalgebra::DVector::from_row_slice(
            diag,
        )))
    }

    pub fn zeros(dim: usize) -> Result<Self> {
        Self::new(DMatrix::zeros(dim, dim))
    }

    pub fn identity(dim: usize) -> Result<Self> {
        Self::new(DMatrix::identity(dim, dim))
    }

    pub fn dim(&self) -> usize {
        self.inner.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.inner
    }

    /// The relaxation shift `alpha * I - A`, which stays symmetric.
    pub fn relaxation_shift(&self, alpha: f64) -> SymmetricMatrix {
        let mut shifted = -&self.inner;
        for i in 0..self.dim() {
            shifted[(i, i)] += alpha;
        }
        SymmetricMatrix { inner: shifted }
    }

    /// Gershgorin disc bounds `(lo, hi)` enclosing every eigenvalue:
    /// `lo = min_i(a_ii - r_i)`, `hi = max_i(a_ii + r_i)` with
    /// `r_i = sum_{j != i} |a_ij|`.
    pub fn gershgorin_bounds(&self) -> (f64, f64) {
        let n = self.dim();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let mut radius = 0.0;
            for j in 0..n {
                if j != i {
                    radius += self.inner[(i, j)].abs();
                }
            }
            let center = self.inner[(i, i)];
            lo = lo.min(center - radius);
            hi = hi.max(center + radius);
        }
        (lo, hi)
    }
}

/// An `m x k` matrix with orthonormal columns (`W^T W = I_k`, `m >= k`), the
/// decision variable of the quadratic problem.
#[derive(Debug, Clone, PartialEq)]
pub struct StiefelMatrix {
    inner: DMatrix<f64>,
}

impl StiefelMatrix {
    /// Construction-checked with the default tolerance [`DEFAULT_ORTHO_TOL`].
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        Self::with_tol(matrix, DEFAULT_ORTHO_TOL)
    }

    pub fn with_tol(matrix: DMatrix<f64>, ortho_tol: f64) -> Result<Self> {
        if matrix.nrows() == 0 || matrix.ncols() == 0 {
            return Err(Error::EmptyMatrix);
        }
        if matrix.nrows() < matrix.ncols() {
            return Err(Error::dims(
                "Stiefel matrix requires rows >= cols",
                (matrix.ncols(), matrix.ncols()),
                (matrix.nrows(), matrix.ncols()),
            ));
        }
        if !matrix.iter().all(|x| x.is_finite()) {
            return Err(Error::NonFinite);
        }
        let candidate = Self { inner: matrix };
        let error = candidate.orthogonality_error();
        if error > ortho_tol {
            return Err(Error::NotOrthonormal {
                error,
                tol: ortho_tol,
            });
        }
        Ok(candidate)
    }

    /// From row-major entries, checked with the default tolerance.
    pub fn from_rows(rows: usize, cols: usize, entries: &[f64]) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::dims(
                "row-major entry buffer",
                (rows, cols),
                (entries.len(), 1),
            ));
        }
        Self::new(DMatrix::from_row_slice(rows, cols, entries))
    }

    /// Caller guarantees orthonormality (e.g. the output of the SVD
    /// projection step).
    pub(crate) fn new_unchecked(matrix: DMatrix<f64>) -> Self {
        debug_assert!(matrix.nrows() >= matrix.ncols());
        Self { inner: matrix }
    }

    pub fn rows(&self) -> usize {
        self.inner.nrows()
    }

    pub fn cols(&self) -> usize {
        self.inner.ncols()
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.inner
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.inner
    }

    /// `||W^T W - I_k||_F`, the feasibility drift.
    pub fn orthogonality_error(&self) -> f64 {
        let k = self.cols();
        let gram = self.inner.transpose() * &self.inner;
        (gram - DMatrix::identity(k, k)).norm()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_construction_symmetrizes() {
        let a = SymmetricMatrix::from_rows(2, &[1.0, 2.0, 0.0, 3.0]).unwrap();
        assert_eq!(a.as_matrix()[(0, 1)], 1.0);
        assert_eq!(a.as_matrix()[(1, 0)], 1.0);
    }

    #[test]
    fn symmetric_rejects_non_square() {
        let m = DMatrix::zeros(2, 3);
        assert!(matches!(
            SymmetricMatrix::new(m),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn dense_rejects_nan() {
        assert!(matches!(
            DenseMatrix::from_rows(1, 2, &[1.0, f64::NAN]),
            Err(Error::NonFinite)
        ));
    }

    #[test]
    fn relaxation_shift_is_alpha_i_minus_a() {
        let a = SymmetricMatrix::from_diagonal(&[2.0, 0.0]).unwrap();
        let shifted = a.relaxation_shift(3.0);
        assert_eq!(shifted.as_matrix()[(0, 0)], 1.0);
        assert_eq!(shifted.as_matrix()[(1, 1)], 3.0);
        assert_eq!(shifted.as_matrix()[(0, 1)], 0.0);
    }

    #[test]
    fn gershgorin_encloses_diagonal() {
        let a = SymmetricMatrix::from_diagonal(&[3.0, -5.0]).unwrap();
        let (lo, hi) = a.gershgorin_bounds();
        assert_eq!(lo, -5.0);
        assert_eq!(hi, 3.0);
    }

    #[test]
    fn stiefel_requires_orthonormal_columns() {
        let ok = StiefelMatrix::from_rows(2, 1, &[0.0, 1.0]);
        assert!(ok.is_ok());
        let bad = StiefelMatrix::from_rows(2, 1, &[1.0, 1.0]);
        assert!(matches!(bad, Err(Error::NotOrthonormal { .. })));
    }

    #[test]
    fn stiefel_rejects_wide_matrices() {
        let wide = DMatrix::identity(1, 2);
        assert!(matches!(
            StiefelMatrix::new(wide),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn ortho_tol_is_configurable() {
        let near = DMatrix::from_row_slice(2, 1, &[1.0 + 1e-6, 0.0]);
        assert!(StiefelMatrix::new(near.clone()).is_err());
        assert!(StiefelMatrix::with_tol(near, 1e-4).is_ok());
    }
}
