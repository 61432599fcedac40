//! Shared helpers for the acceptance and property suites.
#![allow(dead_code)] // each test binary uses a different subset

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use rand::Rng;
use stiefel_qp::{gpi_solve, synth, QpsmProblem, SolveReport, SolverConfig};

/// The randomized problem suite shared by the descent/feasibility/KKT
/// criteria: dimensions in 5..=50, rank at most 10, indefinite A allowed.
pub fn criterion_suite(count: usize, seed: u64) -> Vec<QpsmProblem> {
    let mut rng = synth::rng_from_seed(seed);
    (0..count)
        .map(|_| {
            let m = rng.random_range(5..=50);
            let k = rng.random_range(1..=m.min(10));
            synth::random_qpsm(&mut rng, m, k)
        })
        .collect()
}

/// Best final objective over several restarts (distinct seeds).
pub fn best_of_restarts(
    problem: &QpsmProblem,
    config: &SolverConfig,
    base_seed: u64,
    restarts: u64,
) -> SolveReport {
    let mut best: Option<SolveReport> = None;
    for r in 0..restarts {
        let report = gpi_solve(problem, &config.clone().with_seed(base_seed + r))
            .expect("solve must succeed");
        let better = best
            .as_ref()
            .map(|b| report.final_objective < b.final_objective)
            .unwrap_or(true);
        if better {
            best = Some(report);
        }
    }
    best.expect("at least one restart")
}

/// Directory for counterexample artifacts emitted by the conjecture probes.
pub fn artifact_dir() -> PathBuf {
    let base = std::env::var_os("CARGO_TARGET_TMPDIR")
        .map(PathBuf::from)
        .unwrap_or_else(std::env::temp_dir);
    let dir = base.join("conjecture-counterexamples");
    fs::create_dir_all(&dir).expect("create artifact directory");
    dir
}

/// Matrix dump in the project CSV format: header `rows,cols`, then one row
/// per line, shortest round-trip decimals.
pub fn write_matrix_csv(path: &std::path::Path, m: &nalgebra::DMatrix<f64>) {
    let mut out = String::new();
    out.push_str(&format!("{},{}\n", m.nrows(), m.ncols()));
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| format!("{}", m[(i, j)])).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    fs::write(path, out).expect("write matrix artifact");
}

/// Emits one counterexample instance (problem + description) and returns the
/// directory it was written to.
pub fn emit_counterexample(tag: &str, problem: &QpsmProblem, description: &str) -> PathBuf {
    let dir = artifact_dir().join(tag);
    fs::create_dir_all(&dir).expect("create counterexample directory");
    write_matrix_csv(&dir.join("A.csv"), problem.a().as_matrix());
    write_matrix_csv(&dir.join("B.csv"), problem.b().as_matrix());
    let mut meta = fs::File::create(dir.join("meta.txt")).expect("create meta file");
    writeln!(meta, "{description}").expect("write meta file");
    dir
}
