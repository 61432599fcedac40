//! Solver library for the quadratic problem on the Stiefel manifold,
//! `min Tr(W^T A W - 2 W^T B)` subject to `W^T W = I_k`, via generalized
//! power iteration, together with its two classic reductions — orthogonal
//! least-square regression and the (un)balanced orthogonal Procrustes
//! problem — and slow, independent verification oracles.
//!
//! The solver alternates `M <- 2 (alpha I - A) W + 2 B` with the SVD-based
//! projection `W <- U V^T`, which maximizes `Tr(W^T M)` in closed form. The
//! objective decreases monotonically and every iterate stays exactly on the
//! manifold.
//!
//! ```
//! use stiefel_qp::{gpi_solve, QpsmProblem, SolverConfig};
//! use stiefel_qp::{DenseMatrix, SymmetricMatrix};
//!
//! let a = SymmetricMatrix::from_diagonal(&[2.0, 0.0]).unwrap();
//! let b = DenseMatrix::from_rows(2, 1, &[0.0, 1.0]).unwrap();
//! let problem = QpsmProblem::new(a, b).unwrap();
//! let report = gpi_solve(&problem, &SolverConfig::default().with_tau(1e-9)).unwrap();
//! assert!((report.final_objective - (-2.0)).abs() < 1e-6);
//! ```

mod error;
mod gpi;
mod matrix;
pub mod oracle;
mod polar;
mod problems;
mod qpsm;
pub mod synth;

pub use error::{Error, Result};
pub use gpi::{
    estimate_lambda_max, gpi_solve, resolve_alpha, AlphaStrategy, LambdaMaxEstimate,
    SolveReport, SolverConfig,
};
pub use matrix::{DenseMatrix, StiefelMatrix, SymmetricMatrix, DEFAULT_ORTHO_TOL};
pub use polar::{polar_project, PolarProjection, RANK_DEFICIENCY_RTOL};
pub use problems::{
    balanced_procrustes, olsr_reduce, olsr_solve, uopp_reduce, uopp_solve, OlsrProblem,
    OlsrSolution, ProcrustesProblem, UoppReport,
};
pub use qpsm::QpsmProblem;
