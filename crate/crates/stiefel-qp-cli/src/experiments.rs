//! Experiment drivers: shift-parameter sweeps, CPU-time tables, and planted
//! regression runs. Independent (seed, delta) runs execute in parallel up to
//! the `STIEFEL_QP_THREADS` cap; timed table cells run sequentially so the
//! numbers stay clean, each guarded by a per-cell timeout.

use std::path::{Path, PathBuf};
use std::time::Duration;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};
use stiefel_qp::{olsr_solve, synth, uopp_solve, AlphaStrategy, SolverConfig};

use crate::error::{CliError, CliResult};
use crate::mat_io::{atomic_write, write_trajectory_csv};
use crate::report::{Dims, SweepOutcome, SweepRun, SweepSummary};
use crate::table::{format_timing_csv, CellState, TimingCell, TimingRecord};
use crate::timing::{parallel_map, run_with_timeout, thread_cap, thread_cpu_seconds};

/// Relative tolerance for the cross-delta agreement check.
pub const SWEEP_AGREEMENT_RTOL: f64 = 1e-4;

#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub dims: (usize, usize, usize),
    pub deltas: Vec<f64>,
    pub seeds: Vec<u64>,
    pub tau: f64,
    pub max_iters: usize,
    pub output_dir: PathBuf,
}

/// One trajectory per (delta, seed); instances are generated per seed and
/// shared across deltas so final objectives are comparable.
pub fn run_delta_sweep(spec: &SweepSpec) -> CliResult<SweepSummary> {
    if spec.deltas.is_empty() {
        return Err(CliError::input("delta sweep needs at least one delta"));
    }
    if spec.seeds.is_empty() {
        return Err(CliError::input("delta sweep needs at least one seed"));
    }
    let (n, m, k) = spec.dims;
    std::fs::create_dir_all(&spec.output_dir)?;

    let jobs: Vec<(u64, f64)> = spec
        .seeds
        .iter()
        .flat_map(|&seed| spec.deltas.iter().map(move |&delta| (seed, delta)))
        .collect();

    let runs: Vec<SweepRun> = parallel_map(&jobs, thread_cap(), |_, &(seed, delta)| {
        sweep_job(spec, n, m, k, seed, delta)
    });

    let mut max_relative_spread = 0.0f64;
    for &seed in &spec.seeds {
        let finals: Vec<f64> = runs
            .iter()
            .filter(|r| r.seed == seed)
            .filter_map(|r| match r.outcome {
                SweepOutcome::Ok {
                    final_objective, ..
                } => Some(final_objective),
                SweepOutcome::Error { .. } => None,
            })
            .collect();
        if finals.len() < 2 {
            continue;
        }
        let best = finals.iter().cloned().fold(f64::INFINITY, f64::min);
        let worst = finals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        max_relative_spread = max_relative_spread.max((worst - best).abs() / (1.0 + best.abs()));
    }

    let median_iterations_per_delta = spec
        .deltas
        .iter()
        .map(|&delta| {
            let mut counts: Vec<usize> = runs
                .iter()
                .filter(|r| r.delta == delta)
                .filter_map(|r| match r.outcome {
                    SweepOutcome::Ok { iterations, .. } => Some(iterations),
                    SweepOutcome::Error { .. } => None,
                })
                .collect();
            counts.sort_unstable();
            counts.get(counts.len() / 2).copied().unwrap_or(0)
        })
        .collect();

    let summary = SweepSummary {
        kind: "delta_sweep".into(),
        dims: Dims::with_n(n, m, k),
        tau: spec.tau,
        deltas: spec.deltas.clone(),
        seeds: spec.seeds.clone(),
        runs,
        rtol: SWEEP_AGREEMENT_RTOL,
        max_relative_spread,
        final_objectives_agree: max_relative_spread <= SWEEP_AGREEMENT_RTOL,
        median_iterations_per_delta,
    };
    atomic_write(
        &spec.output_dir.join("summary.json"),
        &format!("{}\n", serde_json::to_string_pretty(&summary)?),
    )?;
    Ok(summary)
}

fn sweep_job(
    spec: &SweepSpec,
    n: usize,
    m: usize,
    k: usize,
    seed: u64,
    delta: f64,
) -> SweepRun {
    let file_name = format!("trajectory_delta{delta}_seed{seed}.csv");
    let result = (|| -> CliResult<(SweepOutcome, String)> {
        let problem = synth::gen_instance(n, m, k, seed)?;
        let config = SolverConfig::default()
            .with_alpha_strategy(AlphaStrategy::DeltaTimesLambdaMax { delta })
            .with_tau(spec.tau)
            .with_max_iters(spec.max_iters)
            .with_seed(seed);
        let report = uopp_solve(&problem, &config)?;
        write_trajectory_csv(
            &spec.output_dir.join(&file_name),
            &report.solve.objective_trajectory,
            Some(&report.residual_trajectory),
            &report.solve.kkt_trajectory,
        )?;
        Ok((
            SweepOutcome::Ok {
                final_objective: report.solve.final_objective,
                final_residual_sq: report.final_residual_sq,
                iterations: report.solve.iterations,
                converged: report.solve.converged,
            },
            file_name.clone(),
        ))
    })();

    match result {
        Ok((outcome, file)) => SweepRun {
            delta,
            seed,
            outcome,
            trajectory_file: Some(file),
        },
        // Per-run failures are recorded; the sweep continues.
        Err(e) => SweepRun {
            delta,
            seed,
            outcome: SweepOutcome::Error {
                message: e.to_string(),
            },
            trajectory_file: None,
        },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum BenchKind {
    Uopp,
    Scaling,
    Lsqe,
    Olsr,
}

impl BenchKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            BenchKind::Uopp => "uopp",
            BenchKind::Scaling => "scaling",
            BenchKind::Lsqe => "lsqe",
            BenchKind::Olsr => "olsr",
        }
    }
}

impl std::fmt::Display for BenchKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone)]
pub struct BenchSpec {
    pub kind: BenchKind,
    pub cells: Vec<(usize, usize, usize)>,
    pub tau: f64,
    pub max_iters: usize,
    pub seed: u64,
    pub timeout: Duration,
    pub output_dir: PathBuf,
}

/// CPU-time table over instance cells. Cells run one at a time; the recorded
/// time is the solving thread's CPU time around the solve call (reduction
/// included, generation and I/O excluded).
pub fn run_timing(spec: &BenchSpec) -> CliResult<TimingRecord> {
    if spec.cells.is_empty() {
        return Err(CliError::input("bench needs at least one cell"));
    }
    if spec.kind == BenchKind::Lsqe {
        if let Some(&(n, m, k)) = spec.cells.iter().find(|c| c.2 != 1) {
            return Err(CliError::input(format!(
                "lsqe cells must have k = 1, got ({n},{m},{k})"
            )));
        }
    }
    std::fs::create_dir_all(&spec.output_dir)?;

    let mut cells = Vec::with_capacity(spec.cells.len());
    for &(n, m, k) in &spec.cells {
        let tau = spec.tau;
        let max_iters = spec.max_iters;
        let seed = spec.seed;
        let outcome = run_with_timeout(spec.timeout, move || -> CliResult<CellState> {
            let problem = synth::gen_instance(n, m, k, seed)?;
            let config = SolverConfig::default()
                .with_tau(tau)
                .with_max_iters(max_iters)
                .with_seed(seed)
                .with_record_trajectory(false);
            let cpu_start = thread_cpu_seconds();
            let report = uopp_solve(&problem, &config)?;
            let cpu_seconds = thread_cpu_seconds() - cpu_start;
            if !report.solve.converged {
                return Err(CliError::NonConvergence(format!(
                    "cell ({n},{m},{k}) hit the iteration cap"
                )));
            }
            Ok(CellState::Done {
                cpu_seconds,
                iterations: report.solve.iterations,
                final_residual_sq: report.final_residual_sq,
            })
        });
        let state = match outcome {
            Some(result) => result?,
            None => CellState::TimedOut,
        };
        cells.push(TimingCell { n, m, k, state });
    }

    let record = TimingRecord {
        kind: spec.kind.as_str().into(),
        tau: spec.tau,
        seed: spec.seed,
        timeout_secs: spec.timeout.as_secs_f64(),
        cells,
    };
    atomic_write(
        &spec.output_dir.join("timing.csv"),
        &format_timing_csv(&record.cells),
    )?;
    atomic_write(
        &spec.output_dir.join("timing.json"),
        &format!("{}\n", serde_json::to_string_pretty(&record)?),
    )?;
    Ok(record)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum OlsrOutcome {
    Ok {
        converged: bool,
        iterations: usize,
        planted_residual: f64,
        bias_gradient_norm: f64,
        translation_probe_passed: bool,
        trajectory_file: String,
    },
    TimedOut,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OlsrCellRecord {
    pub n: usize,
    pub m: usize,
    pub k: usize,
    #[serde(flatten)]
    pub outcome: OlsrOutcome,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OlsrRecord {
    pub kind: String,
    pub tau: f64,
    pub seed: u64,
    pub cells: Vec<OlsrCellRecord>,
}

/// Planted regression runs: exact-fit recovery, bias stationarity, and the
/// translation-invariance probe (shifting every sample must leave W fixed
/// and move only the bias).
pub fn run_olsr(spec: &BenchSpec) -> CliResult<OlsrRecord> {
    if spec.cells.is_empty() {
        return Err(CliError::input("olsr bench needs at least one cell"));
    }
    std::fs::create_dir_all(&spec.output_dir)?;

    let mut cells = Vec::with_capacity(spec.cells.len());
    for (idx, &(n, m, k)) in spec.cells.iter().enumerate() {
        if k > m {
            return Err(CliError::input(format!(
                "olsr cell ({n},{m},{k}): k must not exceed m"
            )));
        }
        let tau = spec.tau;
        let max_iters = spec.max_iters;
        let seed = spec.seed + idx as u64;
        let output_dir = spec.output_dir.clone();
        let outcome = run_with_timeout(spec.timeout, move || -> CliResult<OlsrOutcome> {
            olsr_cell(n, m, k, seed, tau, max_iters, &output_dir)
        });
        let outcome = match outcome {
            Some(result) => result?,
            None => OlsrOutcome::TimedOut,
        };
        cells.push(OlsrCellRecord { n, m, k, outcome });
    }

    let record = OlsrRecord {
        kind: "olsr".into(),
        tau: spec.tau,
        seed: spec.seed,
        cells,
    };
    atomic_write(
        &spec.output_dir.join("olsr.json"),
        &format!("{}\n", serde_json::to_string_pretty(&record)?),
    )?;
    Ok(record)
}

fn olsr_cell(
    n: usize,
    m: usize,
    k: usize,
    seed: u64,
    tau: f64,
    max_iters: usize,
    output_dir: &Path,
) -> CliResult<OlsrOutcome> {
    let (problem, _, _) = synth::planted_olsr(m, n, k, seed)?;
    let config = SolverConfig::default()
        .with_tau(tau)
        .with_max_iters(max_iters)
        .with_seed(seed);
    let solution = olsr_solve(&problem, &config)?;
    let planted_residual = problem.residual(&solution.w, &solution.b)?;
    let bias_gradient_norm = problem.bias_gradient_norm(&solution.w, &solution.b)?;

    // Translation probe: X' = X + c 1^T leaves the reduction (and thus W)
    // unchanged and shifts the bias to b - W^T c.
    let shift = DVector::from_fn(m, |i, _| 0.5 + i as f64 / m as f64);
    let ones_t = nalgebra::DMatrix::from_element(1, n, 1.0);
    let x_shifted = problem.x().as_matrix() + &shift * ones_t;
    let shifted_problem = stiefel_qp::OlsrProblem::new(
        stiefel_qp::DenseMatrix::new(x_shifted)?,
        problem.y().clone(),
    )?;
    let shifted_solution = olsr_solve(&shifted_problem, &config)?;
    let w_drift = (solution.w.as_matrix() - shifted_solution.w.as_matrix()).norm();
    let expected_bias = &solution.b - solution.w.as_matrix().transpose() * &shift;
    let bias_drift = (&shifted_solution.b - expected_bias).norm();
    let translation_probe_passed = w_drift <= 1e-8 && bias_drift <= 1e-8;

    let trajectory_file = format!("olsr_trajectory_{n}x{m}x{k}_seed{seed}.csv");
    write_trajectory_csv(
        &output_dir.join(&trajectory_file),
        &solution.report.objective_trajectory,
        None,
        &solution.report.kkt_trajectory,
    )?;

    Ok(OlsrOutcome::Ok {
        converged: solution.report.converged,
        iterations: solution.report.iterations,
        planted_residual,
        bias_gradient_norm,
        translation_probe_passed,
        trajectory_file,
    })
}
