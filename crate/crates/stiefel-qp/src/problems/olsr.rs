//! Orthogonal least-square regression:
//! `min ||X^T W + 1 b^T - Y||_F^2` over `W^T W = I_k` with a free bias `b`.
//!
//! Eliminating `b` at its stationary value turns the residual into a
//! centered quadratic problem with `A = X H X^T` and `B = X H Y`, where
//! `H = I - (1/n) 1 1^T`. The centering matrix is never materialized:
//! `n x n` dense `H` would be prohibitive for large sample counts, and one
//! mean subtraction is exact because `H` is idempotent.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::gpi::{gpi_solve, SolveReport, SolverConfig};
use crate::matrix::{DenseMatrix, StiefelMatrix, SymmetricMatrix};
use crate::qpsm::QpsmProblem;

/// Data matrix `X` (`m x n`, features by samples) and target matrix `Y`
/// (`n x k`) with `k <= m`.
#[derive(Debug, Clone)]
pub struct OlsrProblem {
    x: DenseMatrix,
    y: DenseMatrix,
}

impl OlsrProblem {
    pub fn new(x: DenseMatrix, y: DenseMatrix) -> Result<Self> {
        if x.cols() != y.rows() {
            return Err(Error::dims(
                "X columns must match Y rows (one column per sample)",
                (x.cols(), y.cols()),
                (y.rows(), y.cols()),
            ));
        }
        if y.cols() > x.rows() {
            return Err(Error::dims(
                "target count k must not exceed the feature count m",
                (x.rows(), x.rows()),
                (y.rows(), y.cols()),
            ));
        }
        Ok(Self { x, y })
    }

    pub fn x(&self) -> &DenseMatrix {
        &self.x
    }

    pub fn y(&self) -> &DenseMatrix {
        &self.y
    }

    /// Feature count `m`.
    pub fn num_features(&self) -> usize {
        self.x.rows()
    }

    /// Sample count `n`.
    pub fn num_samples(&self) -> usize {
        self.x.cols()
    }

    /// Target count `k`.
    pub fn num_targets(&self) -> usize {
        self.y.cols()
    }

    /// `||X^T W + 1 b^T - Y||_F`.
    pub fn residual(&self, w: &StiefelMatrix, b: &DVector<f64>) -> Result<f64> {
        self.check_solution_dims(w, b)?;
        let n = self.num_samples();
        let ones = DVector::from_element(n, 1.0);
        let fitted = self.x.as_matrix().transpose() * w.as_matrix() + ones * b.transpose();
        Ok((fitted - self.y.as_matrix()).norm())
    }

    /// Norm of the residual gradient with respect to the bias,
    /// `||2 (W^T X 1 + n b - Y^T 1)||_2`; zero at the optimal bias.
    pub fn bias_gradient_norm(&self, w: &StiefelMatrix, b: &DVector<f64>) -> Result<f64> {
        self.check_solution_dims(w, b)?;
        let n = self.num_samples();
        let ones = DVector::from_element(n, 1.0);
        let grad = (w.as_matrix().transpose() * (self.x.as_matrix() * &ones)
            - self.y.as_matrix().transpose() * &ones
            + b * n as f64)
            * 2.0;
        Ok(grad.norm())
    }

    fn check_solution_dims(&self, w: &StiefelMatrix, b: &DVector<f64>) -> Result<()> {
        if w.rows() != self.num_features() || w.cols() != self.num_targets() {
            return Err(Error::dims(
                "W must be m x k",
                (self.num_features(), self.num_targets()),
                (w.rows(), w.cols()),
            ));
        }
        if b.len() != self.num_targets() {
            return Err(Error::dims(
                "bias must have one entry per target",
                (self.num_targets(), 1),
                (b.len(), 1),
            ));
        }
        Ok(())
    }
}

/// Regression solution: orthonormal `W` and the bias recovered from its
/// closed form `b = (1/n)(Y^T 1 - W^T X 1)`.
#[derive(Debug, Clone)]
pub struct OlsrSolution {
    pub w: StiefelMatrix,
    pub b: DVector<f64>,
    pub report: SolveReport,
}

/// Subtracts from each row its mean across columns; this is `M H` for the
/// centering matrix `H`, applied without forming `H`.
fn center_rows(m: &nalgebra::DMatrix<f64>) -> nalgebra::DMatrix<f64> {
    let n = m.ncols() as f64;
    let mut centered = m.clone();
    for mut row in centered.row_iter_mut() {
        let mean = row.sum() / n;
        row.add_scalar_mut(-mean);
    }
    centered
}

/// Builds the quadratic problem `A = X H X^T`, `B = X H Y`.
pub fn olsr_reduce(p: &OlsrProblem) -> QpsmProblem {
    let x_centered = center_rows(p.x.as_matrix());
    let a = &x_centered * x_centered.transpose();
    let b = &x_centered * p.y.as_matrix();
    let a = SymmetricMatrix::new(a).expect("Gram matrix of finite data");
    let b = DenseMatrix::new(b).expect("finite product of finite data");
    QpsmProblem::new(a, b).expect("reduction preserves dimensions")
}

/// Solves the regression by running the power iteration on the reduction and
/// recovering the bias in closed form.
pub fn olsr_solve(p: &OlsrProblem, config: &SolverConfig) -> Result<OlsrSolution> {
    let qpsm = olsr_reduce(p);
    let report = gpi_solve(&qpsm, config)?;
    let w = report.final_w.clone();
    let n = p.num_samples();
    let ones = DVector::from_element(n, 1.0);
    let b = (p.y.as_matrix().transpose() * &ones
        - w.as_matrix().transpose() * (p.x.as_matrix() * &ones))
        / n as f64;
    Ok(OlsrSolution { w, b, report })
}
