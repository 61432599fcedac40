use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use stiefel_qp::{AlphaStrategy, SolverConfig};
use stiefel_qp_cli::commands::{cmd_gen, cmd_solve_olsr, cmd_solve_qpsm, cmd_solve_uopp};
use stiefel_qp_cli::error::{CliError, CliResult};
use stiefel_qp_cli::experiments::{
    run_delta_sweep, run_olsr, run_timing, BenchKind, BenchSpec, SweepSpec,
};
use stiefel_qp_cli::report::SweepOutcome;
use stiefel_qp_cli::table::format_timing_csv;

/// Benchmark harness for the quadratic problem on the Stiefel manifold,
/// solved by generalized power iteration.
///
/// Matrix files are CSV with a `rows,cols` header and one matrix row per
/// line. Dimension triples follow the (n, m, k) convention: E is n x m,
/// G is n x k. Exit codes: 0 success, 2 invalid input, 3 non-convergence.
/// `STIEFEL_QP_THREADS` caps parallel sweep runs (default: logical CPUs).
#[derive(Parser)]
#[command(name = "stiefel-qp", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct SolverOpts {
    /// Objective-decrease stopping tolerance
    #[arg(long, default_value_t = 1e-3)]
    tau: f64,
    /// Iteration cap
    #[arg(long, default_value_t = 10_000)]
    max_iters: usize,
    /// Seed for the random orthonormal initialization
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Shift factor: alpha = delta * estimated lambda_max, delta > 1
    #[arg(long, default_value_t = 1.01)]
    delta: f64,
    /// Explicit shift alpha (verified positive definite, never inflated)
    #[arg(long, conflicts_with = "delta")]
    alpha: Option<f64>,
    /// Derive the shift from the Gershgorin upper bound instead
    #[arg(long, conflicts_with_all = ["delta", "alpha"])]
    gershgorin: bool,
    /// Optional secondary KKT-residual stopping tolerance
    #[arg(long)]
    kkt_tol: Option<f64>,
}

impl SolverOpts {
    fn to_config(&self) -> SolverConfig {
        let alpha_strategy = if let Some(alpha) = self.alpha {
            AlphaStrategy::Explicit(alpha)
        } else if self.gershgorin {
            AlphaStrategy::GershgorinBound
        } else {
            AlphaStrategy::DeltaTimesLambdaMax { delta: self.delta }
        };
        SolverConfig {
            alpha_strategy,
            tau: self.tau,
            max_iters: self.max_iters,
            kkt_tol: self.kkt_tol,
            seed: self.seed,
            record_trajectory: true,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate a benchmark instance: E with |N(0,1)| singular values
    /// (sorted descending), Gaussian G; byte-identical per seed
    Gen {
        /// Dimensions as n,m,k
        #[arg(long, value_parser = parse_dims)]
        dims: (usize, usize, usize),
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        output_dir: PathBuf,
    },
    /// Solve min Tr(W^T A W - 2 W^T B) from <input>/A.csv and <input>/B.csv
    SolveQpsm {
        /// Directory containing A.csv and B.csv
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        solver: SolverOpts,
        #[arg(long)]
        output_dir: PathBuf,
    },
    /// Solve min ||E Q - G||_F^2 from <input>/E.csv and <input>/G.csv
    /// (k = 1 is the constrained least-squares case)
    SolveUopp {
        /// Directory containing E.csv and G.csv
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        solver: SolverOpts,
        #[arg(long)]
        output_dir: PathBuf,
    },
    /// Solve min ||X^T W + 1 b^T - Y||_F^2 from <input>/X.csv and
    /// <input>/Y.csv
    SolveOlsr {
        /// Directory containing X.csv and Y.csv
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        solver: SolverOpts,
        #[arg(long)]
        output_dir: PathBuf,
    },
    /// Convergence trajectories across shift factors: one trajectory CSV per
    /// (delta, seed), plus a summary with the cross-delta agreement check
    SweepDelta {
        /// Dimensions as n,m,k
        #[arg(long, value_parser = parse_dims)]
        dims: (usize, usize, usize),
        #[arg(long, value_delimiter = ',', default_values_t = vec![1.01, 2.0, 5.0, 10.0])]
        deltas: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_values_t = vec![0u64])]
        seeds: Vec<u64>,
        #[arg(long, default_value_t = 1e-3)]
        tau: f64,
        #[arg(long, default_value_t = 10_000)]
        max_iters: usize,
        #[arg(long)]
        output_dir: PathBuf,
    },
    /// CPU-time tables over instance cells; cells exceeding the timeout are
    /// recorded as "-"
    Bench {
        /// uopp/lsqe run explicit --cell triples; scaling sweeps --ks at
        /// fixed --n (with n = m); olsr runs planted regression cells
        #[arg(long, value_enum, default_value_t = BenchKind::Uopp)]
        kind: BenchKind,
        /// Cell dimensions as n,m,k (repeatable)
        #[arg(long = "cell", value_parser = parse_dims)]
        cells: Vec<(usize, usize, usize)>,
        /// Square dimension for --kind scaling
        #[arg(long)]
        n: Option<usize>,
        /// k values for --kind scaling
        #[arg(long, value_delimiter = ',')]
        ks: Vec<usize>,
        #[arg(long, default_value_t = 1e-3)]
        tau: f64,
        #[arg(long, default_value_t = 100_000)]
        max_iters: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Per-cell timeout in seconds
        #[arg(long, default_value_t = 600.0)]
        timeout_secs: f64,
        #[arg(long)]
        output_dir: PathBuf,
    },
}

fn parse_dims(s: &str) -> Result<(usize, usize, usize), String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(format!("expected n,m,k, got {s:?}"));
    }
    let parse = |x: &str| {
        x.trim()
            .parse::<usize>()
            .map_err(|_| format!("bad dimension {x:?}"))
    };
    Ok((parse(parts[0])?, parse(parts[1])?, parse(parts[2])?))
}

fn dispatch(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Gen {
            dims,
            seed,
            output_dir,
        } => cmd_gen(dims, seed, &output_dir),
        Command::SolveQpsm {
            input,
            solver,
            output_dir,
        } => cmd_solve_qpsm(&input, &solver.to_config(), &output_dir),
        Command::SolveUopp {
            input,
            solver,
            output_dir,
        } => cmd_solve_uopp(&input, &solver.to_config(), &output_dir),
        Command::SolveOlsr {
            input,
            solver,
            output_dir,
        } => cmd_solve_olsr(&input, &solver.to_config(), &output_dir),
        Command::SweepDelta {
            dims,
            deltas,
            seeds,
            tau,
            max_iters,
            output_dir,
        } => {
            let spec = SweepSpec {
                dims,
                deltas,
                seeds,
                tau,
                max_iters,
                output_dir,
            };
            let summary = run_delta_sweep(&spec)?;
            println!(
                "delta sweep ({},{},{}): {} runs, max relative spread {:.3e} \
                 (tolerance {:.0e}), median iterations per delta {:?}",
                spec.dims.0,
                spec.dims.1,
                spec.dims.2,
                summary.runs.len(),
                summary.max_relative_spread,
                summary.rtol,
                summary.median_iterations_per_delta
            );
            if !summary.final_objectives_agree {
                eprintln!(
                    "warning: final objectives disagree across deltas beyond {:.0e} relative",
                    summary.rtol
                );
            }
            let bad: Vec<String> = summary
                .runs
                .iter()
                .filter_map(|r| match &r.outcome {
                    SweepOutcome::Ok { converged: true, .. } => None,
                    SweepOutcome::Ok { converged: false, .. } => {
                        Some(format!("delta {} seed {}: iteration cap", r.delta, r.seed))
                    }
                    SweepOutcome::Error { message } => {
                        Some(format!("delta {} seed {}: {message}", r.delta, r.seed))
                    }
                })
                .collect();
            if !bad.is_empty() {
                return Err(CliError::NonConvergence(bad.join("; ")));
            }
            Ok(())
        }
        Command::Bench {
            kind,
            mut cells,
            n,
            ks,
            tau,
            max_iters,
            seed,
            timeout_secs,
            output_dir,
        } => {
            if kind == BenchKind::Scaling {
                let n = n.ok_or_else(|| CliError::input("--kind scaling requires --n"))?;
                if ks.is_empty() {
                    return Err(CliError::input("--kind scaling requires --ks"));
                }
                cells = ks.iter().map(|&k| (n, n, k)).collect();
            } else if n.is_some() || !ks.is_empty() {
                return Err(CliError::input(
                    "--n/--ks only apply to --kind scaling; use --cell n,m,k",
                ));
            }
            if !timeout_secs.is_finite() || timeout_secs <= 0.0 {
                return Err(CliError::input("--timeout-secs must be positive"));
            }
            let spec = BenchSpec {
                kind,
                cells,
                tau,
                max_iters,
                seed,
                timeout: Duration::from_secs_f64(timeout_secs),
                output_dir,
            };
            match kind {
                BenchKind::Olsr => {
                    let record = run_olsr(&spec)?;
                    println!("{}", serde_json::to_string_pretty(&record)?);
                }
                _ => {
                    let record = run_timing(&spec)?;
                    print!("{}", format_timing_csv(&record.cells));
                }
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
