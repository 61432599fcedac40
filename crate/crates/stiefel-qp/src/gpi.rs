//! The generalized power iteration solver.
//!
//! Each sweep updates `M <- 2 (alpha I - A) W + 2 B` and projects back onto
//! the manifold with `W <- U V^T` from the compact SVD of `M`. Because the
//! projection maximizes `Tr(W^T M)` exactly, the quadratic objective
//! decreases monotonically and the iteration lands on a KKT point of the
//! relaxed problem.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::matrix::{DenseMatrix, StiefelMatrix, SymmetricMatrix};
use crate::polar::polar_project;
use crate::qpsm::QpsmProblem;
use crate::synth;

/// How the relaxation shift `alpha` is chosen. Whatever the strategy,
/// positive definiteness of `alpha I - A` is verified by an actual Cholesky
/// factorization before the iteration starts.
#[derive(Debug, Clone, PartialEq)]
pub enum AlphaStrategy {
    /// Use exactly this value; rejected (never inflated) if the Cholesky
    /// check fails.
    Explicit(f64),
    /// `alpha = delta * lambda_max_estimate + margin` with `delta > 1`.
    /// Smaller deltas converge faster, so the default stays near 1.
    DeltaTimesLambdaMax { delta: f64 },
    /// The Gershgorin upper bound on the spectrum; cheap, no iteration, but
    /// usually much larger than `lambda_max`.
    GershgorinBound,
}

impl Default for AlphaStrategy {
    fn default() -> Self {
        AlphaStrategy::DeltaTimesLambdaMax { delta: 1.01 }
    }
}

/// Solver knobs. `tau` is the absolute objective-decrease stopping threshold
/// (the experimental protocol default is `1e-3`); `kkt_tol`, when set, adds a
/// scale-robust secondary test that must also pass before the solver stops.
#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub alpha_strategy: AlphaStrategy,
    pub tau: f64,
    pub max_iters: usize,
    pub kkt_tol: Option<f64>,
    pub seed: u64,
    pub record_trajectory: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            alpha_strategy: AlphaStrategy::default(),
            tau: 1e-3,
            max_iters: 10_000,
            kkt_tol: None,
            seed: 0,
            record_trajectory: true,
        }
    }
}

impl SolverConfig {
    pub fn with_alpha_strategy(mut self, strategy: AlphaStrategy) -> Self {
        self.alpha_strategy = strategy;
        self
    }

    pub fn with_tau(mut self, tau: f64) -> Self {
        self.tau = tau;
        self
    }

    pub fn with_max_iters(mut self, max_iters: usize) -> Self {
        self.max_iters = max_iters;
        self
    }

    pub fn with_kkt_tol(mut self, kkt_tol: f64) -> Self {
        self.kkt_tol = Some(kkt_tol);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_record_trajectory(mut self, record: bool) -> Self {
        self.record_trajectory = record;
        self
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "tau must be a positive finite number, got {}",
                self.tau
            )));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidConfig("max_iters must be at least 1".into()));
        }
        if let Some(tol) = self.kkt_tol {
            if !(tol > 0.0 && tol.is_finite()) {
                return Err(Error::InvalidConfig(format!(
                    "kkt_tol must be a positive finite number, got {tol}"
                )));
            }
        }
        match self.alpha_strategy {
            AlphaStrategy::Explicit(alpha) if !alpha.is_finite() => Err(Error::InvalidConfig(
                format!("explicit alpha must be finite, got {alpha}"),
            )),
            AlphaStrategy::DeltaTimesLambdaMax { delta } if !(delta > 1.0 && delta.is_finite()) => {
                Err(Error::InvalidConfig(format!(
                    "delta must be a finite number greater than 1, got {delta}"
                )))
            }
            _ => Ok(()),
        }
    }
}

/// Outcome of one solve.
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub final_w: StiefelMatrix,
    pub final_objective: f64,
    /// Number of sweeps performed (the initial point counts as iteration 0).
    pub iterations: usize,
    /// Objective values per iteration, starting with the initial point, so
    /// monotonicity is checkable from the first update. Empty when trajectory
    /// recording is disabled.
    pub objective_trajectory: Vec<f64>,
    /// KKT residuals aligned with `objective_trajectory` (one per recorded
    /// iterate, ending at the final point). Empty when recording is disabled.
    pub kkt_trajectory: Vec<f64>,
    pub kkt_residual: f64,
    /// The relaxation shift actually used; `None` for closed-form paths that
    /// never relax.
    pub alpha_used: Option<f64>,
    pub elapsed_seconds: f64,
    /// True iff the decrease test (and the KKT test, when enabled) fired
    /// before the iteration cap.
    pub converged: bool,
    /// True if any projection sub-problem had a rank-deficient `M`, in which
    /// case intermediate argmaxes were not unique.
    pub non_unique_subproblem_seen: bool,
    /// Largest `||W^T W - I||_F` observed across all iterates.
    pub max_feasibility_error: f64,
}

/// Estimate of the algebraically largest eigenvalue.
#[derive(Debug, Clone, Copy)]
pub struct LambdaMaxEstimate {
    pub value: f64,
    /// Set when power iteration did not converge and the Gershgorin upper
    /// bound was returned instead.
    pub bound_fallback: bool,
    pub iterations: usize,
}

/// Estimates `lambda_max(A)`, the algebraically largest eigenvalue.
///
/// Plain power iteration targets the eigenvalue of greatest *magnitude*,
/// which for an indefinite matrix such as `diag(3, -5)` would be `-5` —
/// useless for making `alpha I - A` positive definite. Iterating on the
/// shifted matrix `A + cI`, with `c` the magnitude of the Gershgorin lower
/// bound, makes the algebraic maximum dominant; the shift is subtracted from
/// the result. Deterministic for a given seed.
pub fn estimate_lambda_max(
    a: &SymmetricMatrix,
    tol: f64,
    max_iters: usize,
    seed: u64,
) -> LambdaMaxEstimate {
    let (lo, hi) = a.gershgorin_bounds();
    let shift = lo.abs();
    let mut rng = synth::rng_from_seed(seed);
    let mut v = synth::gaussian_matrix(&mut rng, a.dim(), 1);
    let norm = v.norm();
    if norm > 0.0 {
        v /= norm;
    } else {
        v[(0, 0)] = 1.0;
    }

    for iteration in 1..=max_iters {
        let u = a.as_matrix() * &v + &v * shift;
        let rayleigh = v.dot(&u);
        let residual = (&u - &v * rayleigh).norm();
        if residual <= tol * (1.0 + rayleigh.abs()) {
            return LambdaMaxEstimate {
                value: rayleigh - shift,
                bound_fallback: false,
                iterations: iteration,
            };
        }
        let norm = u.norm();
        if norm == 0.0 {
            // (A + cI) v = 0 exactly; v already spans a null direction.
            return LambdaMaxEstimate {
                value: -shift,
                bound_fallback: false,
                iterations: iteration,
            };
        }
        v = u / norm;
    }
    LambdaMaxEstimate {
        value: hi,
        bound_fallback: true,
        iterations: max_iters,
    }
}

const LAMBDA_TOL: f64 = 1e-9;
const LAMBDA_MAX_ITERS: usize = 5_000;
const MAX_MARGIN_DOUBLINGS: usize = 60;

fn base_margin(scale: f64) -> f64 {
    (1e-8 * scale.abs()).max(1e-8)
}

fn cholesky_accepts(a: &SymmetricMatrix, alpha: f64) -> bool {
    if !alpha.is_finite() {
        return false;
    }
    let shifted = a.relaxation_shift(alpha);
    nalgebra::Cholesky::new(shifted.as_matrix().clone()).is_some()
}

/// Picks `alpha` per the strategy and verifies positive definiteness of
/// `alpha I - A` by attempting a Cholesky factorization.
///
/// Estimated strategies are inflated on verification failure by doubling the
/// margin `alpha - lambda_hat` (reset to a small positive floor if the
/// initial margin is not positive, which happens when `lambda_hat <= 0`),
/// at most 60 times. `Explicit` is never inflated: a failing explicit alpha
/// is a configuration error.
pub fn resolve_alpha(a: &SymmetricMatrix, strategy: &AlphaStrategy, seed: u64) -> Result<f64> {
    match *strategy {
        AlphaStrategy::Explicit(alpha) => {
            if !alpha.is_finite() {
                return Err(Error::InvalidConfig(format!(
                    "explicit alpha must be finite, got {alpha}"
                )));
            }
            if cholesky_accepts(a, alpha) {
                Ok(alpha)
            } else {
                Err(Error::NotPositiveDefinite { alpha })
            }
        }
        AlphaStrategy::DeltaTimesLambdaMax { delta } => {
            if !(delta > 1.0 && delta.is_finite()) {
                return Err(Error::InvalidConfig(format!(
                    "delta must be a finite number greater than 1, got {delta}"
                )));
            }
            let estimate = estimate_lambda_max(a, LAMBDA_TOL, LAMBDA_MAX_ITERS, seed);
            let lambda_hat = estimate.value;
            inflate_until_pd(a, delta * lambda_hat + base_margin(lambda_hat), lambda_hat)
        }
        AlphaStrategy::GershgorinBound => {
            let (_, hi) = a.gershgorin_bounds();
            inflate_until_pd(a, hi + base_margin(hi), hi)
        }
    }
}

fn inflate_until_pd(a: &SymmetricMatrix, alpha0: f64, lambda_ref: f64) -> Result<f64> {
    let mut alpha = alpha0;
    for _ in 0..=MAX_MARGIN_DOUBLINGS {
        if cholesky_accepts(a, alpha) {
            return Ok(alpha);
        }
        let margin = alpha - lambda_ref;
        let margin = if margin > 0.0 {
            margin * 2.0
        } else {
            base_margin(lambda_ref)
        };
        alpha = lambda_ref + margin;
    }
    Err(Error::NotPositiveDefinite { alpha })
}

/// Runs the power iteration on a quadratic problem.
///
/// The initial point is the polar projection of a seeded Gaussian matrix, so
/// runs are reproducible per seed. Stops when the objective decrease falls to
/// `tau` or below (and, when `kkt_tol` is set, the KKT residual is also within
/// tolerance); `converged` reports whether that happened before `max_iters`.
pub fn gpi_solve(problem: &QpsmProblem, config: &SolverConfig) -> Result<SolveReport> {
    config.validate()?;
    let start = Instant::now();

    let alpha = resolve_alpha(problem.a(), &config.alpha_strategy, config.seed)?;
    let a_tilde = problem.a().relaxation_shift(alpha);
    let two_b = problem.b().as_matrix() * 2.0;

    let mut rng = synth::rng_from_seed(config.seed);
    let mut w = synth::random_stiefel(&mut rng, problem.dim(), problem.k());
    let mut objective = problem.objective(&w)?;
    let mut trajectory = Vec::new();
    let mut kkt_trajectory = Vec::new();
    if config.record_trajectory {
        trajectory.push(objective);
    }
    let mut max_feasibility_error = w.orthogonality_error();
    let mut non_unique_seen = false;
    let mut converged = false;
    let mut iterations = 0;

    for iteration in 1..=config.max_iters {
        let m_step = a_tilde.as_matrix() * w.as_matrix() * 2.0 + &two_b;
        if config.record_trajectory {
            // M/2 is exactly (alpha I - A) W + B at the current iterate.
            kkt_trajectory.push(crate::qpsm::kkt_residual_from_gradient(
                &(&m_step * 0.5),
                w.as_matrix(),
            ));
        }
        let m_step = DenseMatrix::new(m_step)
            .map_err(|_| Error::NonFiniteIteration { iteration })?;
        let projection = polar_project(&m_step)?;
        non_unique_seen |= projection.non_unique;

        let w_next = projection.w;
        let objective_next = problem.objective(&w_next)?;
        if !objective_next.is_finite() {
            return Err(Error::NonFiniteIteration { iteration });
        }
        max_feasibility_error = max_feasibility_error.max(w_next.orthogonality_error());
        if config.record_trajectory {
            trajectory.push(objective_next);
        }
        let decrease = objective - objective_next;
        w = w_next;
        objective = objective_next;
        iterations = iteration;

        if decrease <= config.tau {
            let kkt_ok = match config.kkt_tol {
                None => true,
                Some(tol) => problem.kkt_residual(alpha, &w)? <= tol,
            };
            if kkt_ok {
                converged = true;
                break;
            }
        }
    }

    let kkt_residual = problem.kkt_residual(alpha, &w)?;
    if config.record_trajectory {
        kkt_trajectory.push(kkt_residual);
    }
    Ok(SolveReport {
        final_objective: objective,
        final_w: w,
        iterations,
        objective_trajectory: trajectory,
        kkt_trajectory,
        kkt_residual,
        alpha_used: Some(alpha),
        elapsed_seconds: start.elapsed().as_secs_f64(),
        converged,
        non_unique_subproblem_seen: non_unique_seen,
        max_feasibility_error,
    })
}
