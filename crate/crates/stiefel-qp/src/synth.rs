//! Seeded instance generation: random test problems, the benchmark matrix
//! law (orthonormal factors with prescribed singular values), and planted
//! instances with a known solution.
//!
//! Everything here is deterministic per seed. Sampling order is part of the
//! reproducibility contract: matrices are filled column-major, and
//! `gen_instance` draws `P`, then `R`, then the singular values, then `G`.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::matrix::{DenseMatrix, StiefelMatrix, SymmetricMatrix};
use crate::polar::polar_project;
use crate::problems::{OlsrProblem, ProcrustesProblem};
use crate::qpsm::QpsmProblem;

/// Seed-stable RNG used across the crate.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard Gaussian matrix, filled column-major.
pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

/// Uniformly-oriented random point on the Stiefel manifold, obtained by the
/// polar projection of a Gaussian matrix. Requires `m >= k`.
pub fn random_stiefel<R: Rng + ?Sized>(rng: &mut R, m: usize, k: usize) -> StiefelMatrix {
    assert!(m >= k && k >= 1, "Stiefel manifold requires m >= k >= 1");
    let gaussian = DenseMatrix::new(gaussian_matrix(rng, m, k)).expect("finite Gaussian sample");
    polar_project(&gaussian)
        .expect("polar projection of a Gaussian matrix")
        .w
}

/// Symmetrized Gaussian matrix.
pub fn random_symmetric<R: Rng + ?Sized>(rng: &mut R, m: usize) -> SymmetricMatrix {
    SymmetricMatrix::new(gaussian_matrix(rng, m, m)).expect("finite Gaussian sample")
}

/// Random positive semi-definite matrix `L^T L` from a Gaussian `L`.
pub fn random_psd<R: Rng + ?Sized>(rng: &mut R, m: usize) -> SymmetricMatrix {
    let l = gaussian_matrix(rng, m, m);
    SymmetricMatrix::new(l.transpose() * &l).expect("finite Gram matrix")
}

/// Random quadratic problem with symmetrized Gaussian `A` (indefinite in
/// general) and Gaussian `B`.
pub fn random_qpsm<R: Rng + ?Sized>(rng: &mut R, m: usize, k: usize) -> QpsmProblem {
    let a = random_symmetric(rng, m);
    let b = DenseMatrix::new(gaussian_matrix(rng, m, k)).expect("finite Gaussian sample");
    QpsmProblem::new(a, b).expect("compatible dimensions")
}

/// Benchmark instance: `E = P diag(s) R^T` where `P` (`n x p`) and `R`
/// (`m x p`, `p = min(n, m)`) are orthonormal factors of seeded Gaussian
/// matrices and `s_i = |N(0, 1)|` sorted descending, so `E` has exactly the
/// generated singular values. `G` is Gaussian `n x k`.
pub fn gen_instance(n: usize, m: usize, k: usize, seed: u64) -> Result<ProcrustesProblem> {
    let mut rng = rng_from_seed(seed);
    let p = n.min(m);
    let left = random_stiefel(&mut rng, n, p);
    let right = random_stiefel(&mut rng, m, p);
    let mut singular_values: Vec<f64> = (0..p)
        .map(|_| rng.sample::<f64, _>(StandardNormal).abs())
        .collect();
    singular_values.sort_by(|a, b| b.partial_cmp(a).expect("finite singular values"));
    let sigma = DMatrix::from_diagonal(&DVector::from_row_slice(&singular_values));
    let e = left.as_matrix() * sigma * right.as_matrix().transpose();
    let g = gaussian_matrix(&mut rng, n, k);
    ProcrustesProblem::new(DenseMatrix::new(e)?, DenseMatrix::new(g)?)
}

/// Unbalanced Procrustes instance with a planted exact solution:
/// `G = E Q0` for a random `Q0` on the manifold, so the optimal residual is
/// zero. Returns the problem and `Q0`. Requires `n >= m >= k` so `E` has
/// full column rank almost surely.
pub fn planted_uopp(
    n: usize,
    m: usize,
    k: usize,
    seed: u64,
) -> Result<(ProcrustesProblem, StiefelMatrix)> {
    assert!(n >= m && m >= k, "planted instances require n >= m >= k");
    let mut rng = rng_from_seed(seed);
    let e = gaussian_matrix(&mut rng, n, m);
    let q0 = random_stiefel(&mut rng, m, k);
    let g = &e * q0.as_matrix();
    let problem = ProcrustesProblem::new(DenseMatrix::new(e)?, DenseMatrix::new(g)?)?;
    Ok((problem, q0))
}

/// Regression instance with a planted exact fit: `Y = X^T W0 + 1 b0^T`.
/// Returns the problem, `W0` and `b0`.
pub fn planted_olsr(
    m: usize,
    n: usize,
    k: usize,
    seed: u64,
) -> Result<(OlsrProblem, StiefelMatrix, DVector<f64>)> {
    assert!(m >= k, "regression matrix requires m >= k");
    let mut rng = rng_from_seed(seed);
    let x = gaussian_matrix(&mut rng, m, n);
    let w0 = random_stiefel(&mut rng, m, k);
    let b0 = DVector::from_fn(k, |_, _| rng.sample(StandardNormal));
    let ones = DVector::from_element(n, 1.0);
    let y = x.transpose() * w0.as_matrix() + &ones * b0.transpose();
    let problem = OlsrProblem::new(DenseMatrix::new(x)?, DenseMatrix::new(y)?)?;
    Ok((problem, w0, b0))
}
