//! The quadratic problem on the Stiefel manifold and its first-order
//! quantities: `min Tr(W^T A W - 2 W^T B)` subject to `W^T W = I_k`.

use crate::error::{Error, Result};
use crate::matrix::{DenseMatrix, StiefelMatrix, SymmetricMatrix};

/// Problem data `(A, B)` with `A` symmetric `m x m` and `B` of size `m x k`,
/// `k <= m`.
#[derive(Debug, Clone)]
pub struct QpsmProblem {
    a: SymmetricMatrix,
    b: DenseMatrix,
}

impl QpsmProblem {
    pub fn new(a: SymmetricMatrix, b: DenseMatrix) -> Result<Self> {
        if a.dim() != b.rows() {
            return Err(Error::dims(
                "A and B must share the row dimension",
                (a.dim(), a.dim()),
                (b.rows(), b.cols()),
            ));
        }
        if b.cols() > b.rows() {
            return Err(Error::dims(
                "B must have at most as many columns as rows",
                (b.rows(), b.rows()),
                (b.rows(), b.cols()),
            ));
        }
        Ok(Self { a, b })
    }

    pub fn dim(&self) -> usize {
        self.a.dim()
    }

    pub fn k(&self) -> usize {
        self.b.cols()
    }

    pub fn a(&self) -> &SymmetricMatrix {
        &self.a
    }

    pub fn b(&self) -> &DenseMatrix {
        &self.b
    }

    fn check_point(&self, w: &StiefelMatrix) -> Result<()> {
        if w.rows() != self.dim() || w.cols() != self.k() {
            return Err(Error::dims(
                "W must match the problem dimensions",
                (self.dim(), self.k()),
                (w.rows(), w.cols()),
            ));
        }
        Ok(())
    }

    /// `Tr(W^T A W) - 2 Tr(W^T B)`.
    pub fn objective(&self, w: &StiefelMatrix) -> Result<f64> {
        self.check_point(w)?;
        let w_mat = w.as_matrix();
        let aw = self.a.as_matrix() * w_mat;
        Ok(w_mat.dot(&aw) - 2.0 * w_mat.dot(self.b.as_matrix()))
    }

    /// `Tr(W^T (alpha I - A) W) + 2 Tr(W^T B)`, the relaxed maximization
    /// objective. For any orthonormal `W` it satisfies
    /// `relaxed + objective = alpha * k`, which is what makes the two
    /// problems equivalent. Positive definiteness of `alpha I - A` is the
    /// caller's responsibility and is not re-verified here.
    pub fn relaxed_objective(&self, alpha: f64, w: &StiefelMatrix) -> Result<f64> {
        self.check_point(w)?;
        let w_mat = w.as_matrix();
        let aw = self.a.as_matrix() * w_mat;
        let quadratic = alpha * w_mat.dot(w_mat) - w_mat.dot(&aw);
        Ok(quadratic + 2.0 * w_mat.dot(self.b.as_matrix()))
    }

    /// Normalized first-order stationarity residual of the relaxed problem.
    ///
    /// With `R = (alpha I - A) W + B` and the implied multiplier
    /// `Lambda* = sym(W^T R)`, returns `||R - W Lambda*||_F / max(1, ||R||_F)`.
    /// A value near zero certifies a KKT point; it vanishes exactly at fixed
    /// points of the iteration.
    pub fn kkt_residual(&self, alpha: f64, w: &StiefelMatrix) -> Result<f64> {
        self.check_point(w)?;
        let w_mat = w.as_matrix();
        let r = alpha * w_mat - self.a.as_matrix() * w_mat + self.b.as_matrix();
        Ok(kkt_residual_from_gradient(&r, w_mat))
    }
}

/// Residual given the precomputed half-gradient `R = (alpha I - A) W + B`.
pub(crate) fn kkt_residual_from_gradient(
    r: &nalgebra::DMatrix<f64>,
    w: &nalgebra::DMatrix<f64>,
) -> f64 {
    let wtr = w.transpose() * r;
    let lambda = (&wtr + wtr.transpose()) * 0.5;
    let residual = (r - w * lambda).norm();
    residual / r.norm().max(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn problem(a: SymmetricMatrix, b_entries: &[f64], k: usize) -> QpsmProblem {
        let m = a.dim();
        let b = DenseMatrix::from_rows(m, k, b_entries).unwrap();
        QpsmProblem::new(a, b).unwrap()
    }

    #[test]
    fn objective_reduces_to_trace_for_identity_a() {
        let p = problem(SymmetricMatrix::identity(2).unwrap(), &[0.0, 0.0], 1);
        let w = StiefelMatrix::from_rows(2, 1, &[1.0, 0.0]).unwrap();
        assert_eq!(p.objective(&w).unwrap(), 1.0);
    }

    #[test]
    fn objective_linear_term_only() {
        let p = problem(SymmetricMatrix::zeros(2).unwrap(), &[0.0, 1.0], 1);
        let w = StiefelMatrix::from_rows(2, 1, &[0.0, 1.0]).unwrap();
        assert_eq!(p.objective(&w).unwrap(), -2.0);
    }

    #[test]
    fn objective_matches_scalar_evaluation() {
        // f(theta) = 2 cos^2(theta) - 2 sin(theta) at theta = pi/4.
        let p = problem(
            SymmetricMatrix::from_diagonal(&[2.0, 0.0]).unwrap(),
            &[0.0, 1.0],
            1,
        );
        let t = std::f64::consts::FRAC_PI_4;
        let w = StiefelMatrix::from_rows(2, 1, &[t.cos(), t.sin()]).unwrap();
        let expected = 1.0 - 2.0_f64.sqrt();
        assert!((p.objective(&w).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn relaxed_objective_alpha_zero_zero_a() {
        let p = problem(SymmetricMatrix::zeros(2).unwrap(), &[0.0, 1.0], 1);
        let w = StiefelMatrix::from_rows(2, 1, &[0.0, 1.0]).unwrap();
        let relaxed = p.relaxed_objective(0.0, &w).unwrap();
        assert_eq!(relaxed, -p.objective(&w).unwrap());
    }

    #[test]
    fn relaxed_objective_identity_check() {
        let p = problem(SymmetricMatrix::identity(2).unwrap(), &[0.0, 0.0], 1);
        let w = StiefelMatrix::from_rows(2, 1, &[1.0, 0.0]).unwrap();
        assert!((p.relaxed_objective(2.0, &w).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn relaxed_objective_evaluates_both_sides() {
        let p = problem(
            SymmetricMatrix::from_diagonal(&[2.0, 0.0]).unwrap(),
            &[0.0, 1.0],
            1,
        );
        let w = StiefelMatrix::from_rows(2, 1, &[0.0, 1.0]).unwrap();
        let relaxed = p.relaxed_objective(3.0, &w).unwrap();
        assert!((relaxed - 5.0).abs() < 1e-12);
        let identity = 3.0 * 1.0 - p.objective(&w).unwrap();
        assert!((relaxed - identity).abs() < 1e-12);
    }

    #[test]
    fn kkt_residual_vanishes_when_w_equals_b() {
        // A = 0 and B orthonormal: R = alpha W + B, Lambda* = (alpha + 1) I,
        // so the residual cancels exactly.
        let p = problem(SymmetricMatrix::zeros(2).unwrap(), &[0.0, 1.0], 1);
        let w = StiefelMatrix::from_rows(2, 1, &[0.0, 1.0]).unwrap();
        assert!(p.kkt_residual(1.0, &w).unwrap() < 1e-12);
    }

    #[test]
    fn kkt_residual_vanishes_at_global_optimum() {
        let p = problem(
            SymmetricMatrix::from_diagonal(&[2.0, 0.0]).unwrap(),
            &[0.0, 1.0],
            1,
        );
        let w = StiefelMatrix::from_rows(2, 1, &[0.0, 1.0]).unwrap();
        for alpha in [0.5, 3.0, 10.0] {
            assert!(p.kkt_residual(alpha, &w).unwrap() < 1e-12);
        }
    }

    #[test]
    fn kkt_residual_positive_off_stationary_points() {
        let p = problem(
            SymmetricMatrix::from_diagonal(&[2.0, 0.0]).unwrap(),
            &[0.0, 1.0],
            1,
        );
        let t = 0.7_f64;
        let w = StiefelMatrix::from_rows(2, 1, &[t.cos(), t.sin()]).unwrap();
        assert!(p.kkt_residual(3.0, &w).unwrap() > 1e-3);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let p = problem(SymmetricMatrix::identity(2).unwrap(), &[0.0, 0.0], 1);
        let w = StiefelMatrix::from_rows(3, 1, &[1.0, 0.0, 0.0]).unwrap();
        assert!(p.objective(&w).is_err());
        assert!(p.relaxed_objective(1.0, &w).is_err());
        assert!(p.kkt_residual(1.0, &w).is_err());
    }

    #[test]
    fn problem_rejects_mismatched_a_b() {
        let a = SymmetricMatrix::identity(2).unwrap();
        let b = DenseMatrix::from_rows(3, 1, &[0.0, 0.0, 1.0]).unwrap();
        assert!(QpsmProblem::new(a, b).is_err());
    }

    #[test]
    fn problem_rejects_wide_b() {
        let a = SymmetricMatrix::identity(2).unwrap();
        let b = DenseMatrix::from_rows(2, 3, &[0.0; 6]).unwrap();
        assert!(QpsmProblem::new(a, b).is_err());
    }
}
