//! Independent, slow, exhaustive verifiers: grid search over small Stiefel
//! manifolds, plain power/orthogonal iteration references, and dense
//! eigendecomposition cross-checks. Nothing here shares code with the solver
//! path it verifies.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matrix::{StiefelMatrix, SymmetricMatrix};
use crate::qpsm::QpsmProblem;
use crate::synth;

/// Smallest supported grid resolution.
pub const MIN_RESOLUTION: usize = 8;

/// The exhaustively searchable manifolds. Three angles is the desk-scale
/// ceiling; anything larger needs sampling-based dominance checks instead.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridManifold {
    /// Unit circle, parametrized by one angle.
    V21,
    /// Unit sphere, parametrized by spherical coordinates.
    V31,
    /// Orthonormal 3x2 frames: the first two columns of rotation matrices
    /// over a Z-Y-Z Euler-angle grid. Every orthonormal 3x2 frame extends to
    /// a rotation (flip the third column if the determinant is negative), so
    /// the grid covers the whole manifold.
    V32,
}

impl GridManifold {
    pub fn dims(&self) -> (usize, usize) {
        match self {
            GridManifold::V21 => (2, 1),
            GridManifold::V31 => (3, 1),
            GridManifold::V32 => (3, 2),
        }
    }
}

/// Grid description: `resolution` points per circular dimension (`[0, 2pi)`)
/// and `resolution + 1` per polar dimension (`[0, pi]`, both endpoints), so
/// doubling the resolution yields a nested refinement.
#[derive(Debug, Clone, Copy)]
pub struct GridSpec {
    manifold: GridManifold,
    resolution: usize,
}

impl GridSpec {
    pub fn new(manifold: GridManifold, resolution: usize) -> Result<Self> {
        if resolution < MIN_RESOLUTION {
            return Err(Error::InvalidConfig(format!(
                "grid resolution must be at least {MIN_RESOLUTION}, got {resolution}"
            )));
        }
        Ok(Self {
            manifold,
            resolution,
        })
    }

    pub fn manifold(&self) -> GridManifold {
        self.manifold
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }
}

#[derive(Clone, Copy, PartialEq)]
struct Candidate {
    objective: f64,
    index: [usize; 3],
}

impl Candidate {
    const WORST: Candidate = Candidate {
        objective: f64::INFINITY,
        index: [usize::MAX; 3],
    };

    /// Total order: objective first, then lexicographic grid index, so the
    /// reduction is deterministic regardless of chunking.
    fn better_than(&self, other: &Candidate) -> bool {
        self.objective < other.objective
            || (self.objective == other.objective && self.index < other.index)
    }

    fn min(self, other: Candidate) -> Candidate {
        if other.better_than(&self) {
            other
        } else {
            self
        }
    }
}

fn circular_angles(resolution: usize) -> Vec<f64> {
    (0..resolution)
        .map(|i| std::f64::consts::TAU * i as f64 / resolution as f64)
        .collect()
}

fn polar_angles(resolution: usize) -> Vec<f64> {
    (0..=resolution)
        .map(|j| std::f64::consts::PI * j as f64 / resolution as f64)
        .collect()
}

fn quad_form3(a: &[[f64; 3]; 3], v: &[f64; 3]) -> f64 {
    let mut acc = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            acc += v[i] * a[i][j] * v[j];
        }
    }
    acc
}

fn dot3(u: &[f64; 3], v: &[f64; 3]) -> f64 {
    u[0] * v[0] + u[1] * v[1] + u[2] * v[2]
}

/// Z-Y-Z frame columns: the first two columns of `Rz(alpha) * Ry(beta)`;
/// the third Euler angle rotates within their span.
fn zyz_frame(alpha: f64, beta: f64) -> ([f64; 3], [f64; 3]) {
    let (sa, ca) = alpha.sin_cos();
    let (sb, cb) = beta.sin_cos();
    ([ca * cb, sa * cb, -sb], [-sa, ca, 0.0])
}

/// Exhaustive minimization of the quadratic objective over a small manifold.
///
/// Returns the best grid point and its objective. Ties are broken by
/// lexicographic angle ordering; the scan is parallel over the first angle
/// but the result is independent of the chunking.
pub fn grid_minimize(problem: &QpsmProblem, spec: &GridSpec) -> Result<(StiefelMatrix, f64)> {
    let (m, k) = spec.manifold.dims();
    if problem.dim() != m || problem.k() != k {
        return Err(Error::dims(
            "problem dimensions must match the grid manifold",
            (m, k),
            (problem.dim(), problem.k()),
        ));
    }

    let best = match spec.manifold {
        GridManifold::V21 => grid_v21(problem, spec.resolution),
        GridManifold::V31 => grid_v31(problem, spec.resolution),
        GridManifold::V32 => grid_v32(problem, spec.resolution),
    };

    let w = reconstruct(spec, best.index)?;
    // Report the objective through the public evaluator so callers can
    // reproduce it exactly.
    let objective = problem.objective(&w)?;
    debug_assert!((objective - best.objective).abs() <= 1e-9 * (1.0 + objective.abs()));
    Ok((w, objective))
}

fn grid_v21(problem: &QpsmProblem, resolution: usize) -> Candidate {
    let a = problem.a().as_matrix();
    let b = problem.b().as_matrix();
    let (a00, a01, a11) = (a[(0, 0)], a[(0, 1)], a[(1, 1)]);
    let (b0, b1) = (b[(0, 0)], b[(1, 0)]);
    let thetas = circular_angles(resolution);

    thetas
        .par_iter()
        .enumerate()
        .map(|(i, theta)| {
            let (s, c) = theta.sin_cos();
            let objective =
                a00 * c * c + 2.0 * a01 * c * s + a11 * s * s - 2.0 * (b0 * c + b1 * s);
            Candidate {
                objective,
                index: [i, 0, 0],
            }
        })
        .reduce(|| Candidate::WORST, Candidate::min)
}

fn grid_v31(problem: &QpsmProblem, resolution: usize) -> Candidate {
    let a = to_array3(problem.a());
    let b = problem.b().as_matrix();
    let b0 = [b[(0, 0)], b[(1, 0)], b[(2, 0)]];
    let thetas = circular_angles(resolution);
    let phis = polar_angles(resolution);

    thetas
        .par_iter()
        .enumerate()
        .map(|(i, theta)| {
            let (st, ct) = theta.sin_cos();
            let mut best = Candidate::WORST;
            for (j, phi) in phis.iter().enumerate() {
                let (sp, cp) = phi.sin_cos();
                let w = [sp * ct, sp * st, cp];
                let objective = quad_form3(&a, &w) - 2.0 * dot3(&b0, &w);
                best = best.min(Candidate {
                    objective,
                    index: [i, j, 0],
                });
            }
            best
        })
        .reduce(|| Candidate::WORST, Candidate::min)
}

fn grid_v32(problem: &QpsmProblem, resolution: usize) -> Candidate {
    let a = to_array3(problem.a());
    let b = problem.b().as_matrix();
    let b_col0 = [b[(0, 0)], b[(1, 0)], b[(2, 0)]];
    let b_col1 = [b[(0, 1)], b[(1, 1)], b[(2, 1)]];
    let alphas = circular_angles(resolution);
    let betas = polar_angles(resolution);
    let gammas = circular_angles(resolution);
    let gamma_sc: Vec<(f64, f64)> = gammas.iter().map(|g| g.sin_cos()).collect();

    alphas
        .par_iter()
        .enumerate()
        .map(|(i, &alpha)| {
            let mut best = Candidate::WORST;
            for (j, &beta) in betas.iter().enumerate() {
                let (p1, p2) = zyz_frame(alpha, beta);
                // The quadratic part is invariant under the in-span rotation
                // by gamma, so it is hoisted out of the innermost loop.
                let quadratic = quad_form3(&a, &p1) + quad_form3(&a, &p2);
                let u = dot3(&p1, &b_col0) + dot3(&p2, &b_col1);
                let v = dot3(&p2, &b_col0) - dot3(&p1, &b_col1);
                for (l, &(sg, cg)) in gamma_sc.iter().enumerate() {
                    let objective = quadratic - 2.0 * (cg * u + sg * v);
                    if objective < best.objective
                        || (objective == best.objective && [i, j, l] < best.index)
                    {
                        best = Candidate {
                            objective,
                            index: [i, j, l],
                        };
                    }
                }
            }
            best
        })
        .reduce(|| Candidate::WORST, Candidate::min)
}

fn to_array3(a: &SymmetricMatrix) -> [[f64; 3]; 3] {
    let m = a.as_matrix();
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = m[(i, j)];
        }
    }
    out
}

fn reconstruct(spec: &GridSpec, index: [usize; 3]) -> Result<StiefelMatrix> {
    let r = spec.resolution;
    match spec.manifold {
        GridManifold::V21 => {
            let theta = circular_angles(r)[index[0]];
            let (s, c) = theta.sin_cos();
            StiefelMatrix::new(DMatrix::from_column_slice(2, 1, &[c, s]))
        }
        GridManifold::V31 => {
            let theta = circular_angles(r)[index[0]];
            let phi = polar_angles(r)[index[1]];
            let (st, ct) = theta.sin_cos();
            let (sp, cp) = phi.sin_cos();
            StiefelMatrix::new(DMatrix::from_column_slice(3, 1, &[sp * ct, sp * st, cp]))
        }
        GridManifold::V32 => {
            let alpha = circular_angles(r)[index[0]];
            let beta = polar_angles(r)[index[1]];
            let gamma = circular_angles(r)[index[2]];
            let (p1, p2) = zyz_frame(alpha, beta);
            let (sg, cg) = gamma.sin_cos();
            let w1 = [
                cg * p1[0] + sg * p2[0],
                cg * p1[1] + sg * p2[1],
                cg * p1[2] + sg * p2[2],
            ];
            let w2 = [
                -sg * p1[0] + cg * p2[0],
                -sg * p1[1] + cg * p2[1],
                -sg * p1[2] + cg * p2[2],
            ];
            StiefelMatrix::new(DMatrix::from_column_slice(
                3,
                2,
                &[w1[0], w1[1], w1[2], w2[0], w2[1], w2[2]],
            ))
        }
    }
}

/// Result of the reference power iteration.
#[derive(Debug, Clone)]
pub struct PowerIterationResult {
    /// The dominant eigenvalue — greatest in *magnitude*, unlike the
    /// algebraic maximum the solver's shift selection needs.
    pub eigenvalue: f64,
    pub eigenvector: DVector<f64>,
    pub converged: bool,
    pub iterations: usize,
}

/// Plain power iteration for the magnitude-dominant eigenpair of a symmetric
/// matrix. Stops when `||A w - lambda w||_2 <= tol * (1 + ||A||_F)`;
/// non-convergence (e.g. no spectral gap) is reported, not an error.
pub fn power_iteration(
    a: &SymmetricMatrix,
    seed: u64,
    tol: f64,
    max_iters: usize,
) -> PowerIterationResult {
    let mut rng = synth::rng_from_seed(seed);
    let mut w = DVector::from_fn(a.dim(), |_, _| {
        rng.sample::<f64, _>(rand_distr::StandardNormal)
    });
    w /= w.norm();
    let scale = 1.0 + a.as_matrix().norm();
    let mut eigenvalue = 0.0;

    for iteration in 1..=max_iters {
        let aw = a.as_matrix() * &w;
        eigenvalue = w.dot(&aw);
        let residual = (&aw - &w * eigenvalue).norm();
        if residual <= tol * scale {
            return PowerIterationResult {
                eigenvalue,
                eigenvector: w,
                converged: true,
                iterations: iteration,
            };
        }
        let norm = aw.norm();
        if norm == 0.0 {
            // A w = 0 exactly: w is a null vector and 0 is the eigenvalue.
            return PowerIterationResult {
                eigenvalue: 0.0,
                eigenvector: w,
                converged: true,
                iterations: iteration,
            };
        }
        w = aw / norm;
    }
    PowerIterationResult {
        eigenvalue,
        eigenvector: w,
        converged: false,
        iterations: max_iters,
    }
}

/// Result of the reference orthogonal (subspace) iteration.
#[derive(Debug, Clone)]
pub struct OrthogonalIterationResult {
    pub w: StiefelMatrix,
    pub converged: bool,
    pub iterations: usize,
}

/// Orthogonal iteration (`M <- A W`, thin QR, `W <- Q`) for the top-k
/// eigenspace of a positive semi-definite matrix. The psd precondition is
/// the caller's: for indefinite input the iterate tracks the
/// magnitude-dominant subspace instead.
pub fn orthogonal_iteration(
    a: &SymmetricMatrix,
    k: usize,
    seed: u64,
    tol: f64,
    max_iters: usize,
) -> Result<OrthogonalIterationResult> {
    if k == 0 || k > a.dim() {
        return Err(Error::dims(
            "subspace size k must satisfy 1 <= k <= dim",
            (a.dim(), a.dim().min(1)),
            (a.dim(), k),
        ));
    }
    let mut rng = synth::rng_from_seed(seed);
    let mut w = synth::random_stiefel(&mut rng, a.dim(), k);
    let scale = 1.0 + a.as_matrix().norm();

    for iteration in 1..=max_iters {
        let aw = a.as_matrix() * w.as_matrix();
        let residual = (&aw - w.as_matrix() * (w.as_matrix().transpose() * &aw)).norm();
        if residual <= tol * scale {
            return Ok(OrthogonalIterationResult {
                w,
                converged: true,
                iterations: iteration,
            });
        }
        let q = aw.qr().q();
        w = StiefelMatrix::new_unchecked(q);
    }
    Ok(OrthogonalIterationResult {
        w,
        converged: false,
        iterations: max_iters,
    })
}

/// The SVD-projection variant of the orthogonal iteration (`W <- U V^T`
/// instead of the QR factor). It reaches the same trace value: the two
/// iterations differ by an in-span rotation that leaves `Tr(W^T A W)`
/// unchanged.
pub fn orthogonal_iteration_svd(
    a: &SymmetricMatrix,
    k: usize,
    seed: u64,
    tol: f64,
    max_iters: usize,
) -> Result<OrthogonalIterationResult> {
    if k == 0 || k > a.dim() {
        return Err(Error::dims(
            "subspace size k must satisfy 1 <= k <= dim",
            (a.dim(), a.dim().min(1)),
            (a.dim(), k),
        ));
    }
    let mut rng = synth::rng_from_seed(seed);
    let mut w = synth::random_stiefel(&mut rng, a.dim(), k);
    let scale = 1.0 + a.as_matrix().norm();

    for iteration in 1..=max_iters {
        let aw = a.as_matrix() * w.as_matrix();
        let residual = (&aw - w.as_matrix() * (w.as_matrix().transpose() * &aw)).norm();
        if residual <= tol * scale {
            return Ok(OrthogonalIterationResult {
                w,
                converged: true,
                iterations: iteration,
            });
        }
        let dense = crate::matrix::DenseMatrix::new(aw)?;
        w = crate::polar::polar_project(&dense)?.w;
    }
    Ok(OrthogonalIterationResult {
        w,
        converged: false,
        iterations: max_iters,
    })
}

/// Orthonormal basis of the top-k eigenspace from a dense symmetric
/// eigendecomposition (eigenvalues sorted descending).
pub fn top_k_eigenvectors(a: &SymmetricMatrix, k: usize) -> Result<StiefelMatrix> {
    if k == 0 || k > a.dim() {
        return Err(Error::dims(
            "subspace size k must satisfy 1 <= k <= dim",
            (a.dim(), a.dim().min(1)),
            (a.dim(), k),
        ));
    }
    let eigen = nalgebra::linalg::SymmetricEigen::new(a.as_matrix().clone());
    let mut order: Vec<usize> = (0..a.dim()).collect();
    order.sort_by(|&i, &j| {
        eigen.eigenvalues[j]
            .partial_cmp(&eigen.eigenvalues[i])
            .expect("finite eigenvalues")
    });
    let mut basis = DMatrix::zeros(a.dim(), k);
    for (col, &idx) in order.iter().take(k).enumerate() {
        basis.set_column(col, &eigen.eigenvectors.column(idx));
    }
    StiefelMatrix::new(basis)
}

/// Principal angles (radians, ascending) between the column spans of two
/// orthonormal frames of the same shape: `theta_i = acos(sigma_i(W1^T W2))`.
pub fn principal_angles(w1: &StiefelMatrix, w2: &StiefelMatrix) -> Result<Vec<f64>> {
    if w1.rows() != w2.rows() || w1.cols() != w2.cols() {
        return Err(Error::dims(
            "frames must have the same shape",
            (w1.rows(), w1.cols()),
            (w2.rows(), w2.cols()),
        ));
    }
    let product = w1.as_matrix().transpose() * w2.as_matrix();
    let svd = nalgebra::linalg::SVD::new(product, false, false);
    let angles = svd
        .singular_values
        .iter()
        .map(|s| s.clamp(-1.0, 1.0).acos())
        .collect();
    Ok(angles)
}

/// Largest principal angle between the spans.
pub fn max_principal_angle(w1: &StiefelMatrix, w2: &StiefelMatrix) -> Result<f64> {
    Ok(principal_angles(w1, w2)?
        .into_iter()
        .fold(0.0, f64::max))
}
