//! JSON report schema. Timing lives in its own sub-object so reproducibility
//! checks can strip it and compare the rest byte-for-byte.

use serde::{Deserialize, Serialize};
use stiefel_qp::{AlphaStrategy, SolveReport, SolverConfig};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Dims {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    pub m: usize,
    pub k: usize,
}

impl Dims {
    pub fn with_n(n: usize, m: usize, k: usize) -> Self {
        Dims { n: Some(n), m, k }
    }

    pub fn square(m: usize, k: usize) -> Self {
        Dims { n: None, m, k }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "strategy", content = "value", rename_all = "snake_case")]
pub enum AlphaEcho {
    Explicit(f64),
    DeltaTimesLambdaMax(f64),
    Gershgorin,
}

impl From<&AlphaStrategy> for AlphaEcho {
    fn from(s: &AlphaStrategy) -> Self {
        match *s {
            AlphaStrategy::Explicit(a) => AlphaEcho::Explicit(a),
            AlphaStrategy::DeltaTimesLambdaMax { delta } => AlphaEcho::DeltaTimesLambdaMax(delta),
            AlphaStrategy::GershgorinBound => AlphaEcho::Gershgorin,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ConfigEcho {
    pub tau: f64,
    pub max_iters: usize,
    pub seed: u64,
    pub alpha: AlphaEcho,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kkt_tol: Option<f64>,
}

impl From<&SolverConfig> for ConfigEcho {
    fn from(c: &SolverConfig) -> Self {
        ConfigEcho {
            tau: c.tau,
            max_iters: c.max_iters,
            seed: c.seed,
            alpha: (&c.alpha_strategy).into(),
            kkt_tol: c.kkt_tol,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResultSummary {
    pub final_objective: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub final_residual_sq: Option<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub kkt_residual: f64,
    pub alpha_used: Option<f64>,
    pub non_unique_subproblem_seen: bool,
    pub max_feasibility_error: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bias: Option<Vec<f64>>,
}

impl ResultSummary {
    pub fn from_report(report: &SolveReport) -> Self {
        ResultSummary {
            final_objective: report.final_objective,
            final_residual_sq: None,
            iterations: report.iterations,
            converged: report.converged,
            kkt_residual: report.kkt_residual,
            alpha_used: report.alpha_used,
            non_unique_subproblem_seen: report.non_unique_subproblem_seen,
            max_feasibility_error: report.max_feasibility_error,
            bias: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Timing {
    pub cpu_seconds: f64,
    pub wall_seconds: f64,
}

/// Report for one `solve-*` invocation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveRecord {
    pub kind: String,
    pub dims: Dims,
    pub config: ConfigEcho,
    pub result: ResultSummary,
    pub timing: Timing,
}

/// Metadata emitted next to generated instances.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct GenMeta {
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum SweepOutcome {
    Ok {
        final_objective: f64,
        final_residual_sq: f64,
        iterations: usize,
        converged: bool,
    },
    Error {
        message: String,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepRun {
    pub delta: f64,
    pub seed: u64,
    #[serde(flatten)]
    pub outcome: SweepOutcome,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trajectory_file: Option<String>,
}

/// Summary for one shift-parameter sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepSummary {
    pub kind: String,
    pub dims: Dims,
    pub tau: f64,
    pub deltas: Vec<f64>,
    pub seeds: Vec<u64>,
    pub runs: Vec<SweepRun>,
    /// Relative agreement tolerance on final objectives across deltas.
    pub rtol: f64,
    /// Worst relative spread of final objectives across deltas, per seed.
    pub max_relative_spread: f64,
    pub final_objectives_agree: bool,
    /// Median iteration count per delta (convergence slows as the shift
    /// grows; reported, not asserted).
    pub median_iterations_per_delta: Vec<usize>,
}
