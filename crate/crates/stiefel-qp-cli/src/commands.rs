//! Implementations of the `gen` and `solve-*` subcommands.

use std::path::Path;
use std::time::Instant;

use stiefel_qp::{
    gpi_solve, olsr_solve, uopp_solve, DenseMatrix, OlsrProblem, ProcrustesProblem, QpsmProblem,
    SolverConfig, SymmetricMatrix,
};

use crate::error::{CliError, CliResult};
use crate::mat_io::{atomic_write, read_matrix_csv, write_matrix_csv, write_trajectory_csv};
use crate::report::{Dims, GenMeta, ResultSummary, SolveRecord, Timing};
use crate::timing::thread_cpu_seconds;

pub fn cmd_gen(dims: (usize, usize, usize), seed: u64, output_dir: &Path) -> CliResult<()> {
    let (n, m, k) = dims;
    let problem = stiefel_qp::synth::gen_instance(n, m, k, seed)?;
    std::fs::create_dir_all(output_dir)?;
    write_matrix_csv(&output_dir.join("E.csv"), problem.e().as_matrix())?;
    write_matrix_csv(&output_dir.join("G.csv"), problem.g().as_matrix())?;
    let meta = GenMeta { n, m, k, seed };
    atomic_write(
        &output_dir.join("meta.json"),
        &format!("{}\n", serde_json::to_string_pretty(&meta)?),
    )?;
    println!(
        "generated instance ({n},{m},{k}), seed {seed} -> {}",
        output_dir.display()
    );
    Ok(())
}

fn write_record(output_dir: &Path, record: &SolveRecord) -> CliResult<()> {
    atomic_write(
        &output_dir.join("report.json"),
        &format!("{}\n", serde_json::to_string_pretty(record)?),
    )
}

fn non_convergence(kind: &str, iterations: usize) -> CliError {
    CliError::NonConvergence(format!(
        "{kind}: decrease test did not fire within {iterations} iterations \
         (outputs were still written)"
    ))
}

pub fn cmd_solve_qpsm(input: &Path, config: &SolverConfig, output_dir: &Path) -> CliResult<()> {
    let a = SymmetricMatrix::new(read_matrix_csv(&input.join("A.csv"))?)?;
    let b = DenseMatrix::new(read_matrix_csv(&input.join("B.csv"))?)?;
    let problem = QpsmProblem::new(a, b)?;
    let dims = Dims::square(problem.dim(), problem.k());

    let wall = Instant::now();
    let cpu_start = thread_cpu_seconds();
    let report = gpi_solve(&problem, config)?;
    let timing = Timing {
        cpu_seconds: thread_cpu_seconds() - cpu_start,
        wall_seconds: wall.elapsed().as_secs_f64(),
    };

    std::fs::create_dir_all(output_dir)?;
    write_matrix_csv(&output_dir.join("W.csv"), report.final_w.as_matrix())?;
    write_trajectory_csv(
        &output_dir.join("trajectory.csv"),
        &report.objective_trajectory,
        None,
        &report.kkt_trajectory,
    )?;
    let record = SolveRecord {
        kind: "qpsm".into(),
        dims,
        config: config.into(),
        result: ResultSummary::from_report(&report),
        timing,
    };
    write_record(output_dir, &record)?;
    println!(
        "qpsm: objective {:.6e}, {} iterations, converged {}",
        report.final_objective, report.iterations, report.converged
    );
    if !report.converged {
        return Err(non_convergence("qpsm", report.iterations));
    }
    Ok(())
}

pub fn cmd_solve_uopp(input: &Path, config: &SolverConfig, output_dir: &Path) -> CliResult<()> {
    let e = DenseMatrix::new(read_matrix_csv(&input.join("E.csv"))?)?;
    let g = DenseMatrix::new(read_matrix_csv(&input.join("G.csv"))?)?;
    let problem = ProcrustesProblem::new(e, g)?;
    let dims = Dims::with_n(
        problem.num_rows(),
        problem.ambient_dim(),
        problem.num_targets(),
    );
    // k = 1 is the least-squares problem with a quadratic equality
    // constraint; the algorithm is unchanged.
    let kind = if problem.num_targets() == 1 {
        "lsqe"
    } else {
        "uopp"
    };

    let wall = Instant::now();
    let cpu_start = thread_cpu_seconds();
    let report = uopp_solve(&problem, config)?;
    let timing = Timing {
        cpu_seconds: thread_cpu_seconds() - cpu_start,
        wall_seconds: wall.elapsed().as_secs_f64(),
    };

    std::fs::create_dir_all(output_dir)?;
    write_matrix_csv(&output_dir.join("Q.csv"), report.solve.final_w.as_matrix())?;
    write_trajectory_csv(
        &output_dir.join("trajectory.csv"),
        &report.solve.objective_trajectory,
        Some(&report.residual_trajectory),
        &report.solve.kkt_trajectory,
    )?;
    let mut result = ResultSummary::from_report(&report.solve);
    result.final_residual_sq = Some(report.final_residual_sq);
    let record = SolveRecord {
        kind: kind.into(),
        dims,
        config: config.into(),
        result,
        timing,
    };
    write_record(output_dir, &record)?;
    println!(
        "{kind}: ||EQ - G||^2 = {:.6e}, {} iterations, converged {}",
        report.final_residual_sq, report.solve.iterations, report.solve.converged
    );
    if !report.solve.converged {
        return Err(non_convergence(kind, report.solve.iterations));
    }
    Ok(())
}

pub fn cmd_solve_olsr(input: &Path, config: &SolverConfig, output_dir: &Path) -> CliResult<()> {
    let x = DenseMatrix::new(read_matrix_csv(&input.join("X.csv"))?)?;
    let y = DenseMatrix::new(read_matrix_csv(&input.join("Y.csv"))?)?;
    let problem = OlsrProblem::new(x, y)?;
    let dims = Dims::with_n(
        problem.num_samples(),
        problem.num_features(),
        problem.num_targets(),
    );

    let wall = Instant::now();
    let cpu_start = thread_cpu_seconds();
    let solution = olsr_solve(&problem, config)?;
    let timing = Timing {
        cpu_seconds: thread_cpu_seconds() - cpu_start,
        wall_seconds: wall.elapsed().as_secs_f64(),
    };
    let residual = problem.residual(&solution.w, &solution.b)?;

    std::fs::create_dir_all(output_dir)?;
    write_matrix_csv(&output_dir.join("W.csv"), solution.w.as_matrix())?;
    write_matrix_csv(
        &output_dir.join("b.csv"),
        &nalgebra::DMatrix::from_column_slice(solution.b.len(), 1, solution.b.as_slice()),
    )?;
    write_trajectory_csv(
        &output_dir.join("trajectory.csv"),
        &solution.report.objective_trajectory,
        None,
        &solution.report.kkt_trajectory,
    )?;
    let mut result = ResultSummary::from_report(&solution.report);
    result.final_residual_sq = Some(residual * residual);
    result.bias = Some(solution.b.iter().copied().collect());
    let record = SolveRecord {
        kind: "olsr".into(),
        dims,
        config: config.into(),
        result,
        timing,
    };
    write_record(output_dir, &record)?;
    println!(
        "olsr: ||X^T W + 1 b^T - Y||_F = {:.6e}, {} iterations, converged {}",
        residual, solution.report.iterations, solution.report.converged
    );
    if !solution.report.converged {
        return Err(non_convergence("olsr", solution.report.iterations));
    }
    Ok(())
}
