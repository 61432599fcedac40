//! End-to-end tests of the binary: subcommands, file formats, exit codes,
//! and reproducibility of emitted artifacts.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_stiefel-qp"))
}

fn tmp_dir(tag: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(tag);
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn stiefel-qp")
}

fn assert_success(out: &Output) {
    assert!(
        out.status.success(),
        "exit {:?}\nstdout: {}\nstderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

fn read_json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

/// Objective column of a trajectory CSV.
fn trajectory_objectives(path: &Path) -> Vec<f64> {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "iteration,objective,residual,kkt");
    lines
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect()
}

#[test]
fn gen_is_byte_identical_per_seed() {
    let dir_a = tmp_dir("gen-a");
    let dir_b = tmp_dir("gen-b");
    for dir in [&dir_a, &dir_b] {
        let out = run(&[
            "gen",
            "--dims",
            "20,8,3",
            "--seed",
            "7",
            "--output-dir",
            dir.to_str().unwrap(),
        ]);
        assert_success(&out);
    }
    for file in ["E.csv", "G.csv", "meta.json"] {
        let a = fs::read(dir_a.join(file)).unwrap();
        let b = fs::read(dir_b.join(file)).unwrap();
        assert_eq!(a, b, "{file} differs between identical runs");
    }
    let meta = read_json(&dir_a.join("meta.json"));
    assert_eq!(meta["n"], 20);
    assert_eq!(meta["m"], 8);
    assert_eq!(meta["k"], 3);
    assert_eq!(meta["seed"], 7);
}

#[test]
fn gen_then_solve_uopp_pipeline() {
    let instance = tmp_dir("pipeline-instance");
    assert_success(&run(&[
        "gen",
        "--dims",
        "30,10,4",
        "--seed",
        "3",
        "--output-dir",
        instance.to_str().unwrap(),
    ]));

    let out_a = tmp_dir("pipeline-out-a");
    let result = run(&[
        "solve-uopp",
        "--input",
        instance.to_str().unwrap(),
        "--tau",
        "1e-8",
        "--seed",
        "5",
        "--output-dir",
        out_a.to_str().unwrap(),
    ]);
    assert_success(&result);

    let report = read_json(&out_a.join("report.json"));
    assert_eq!(report["kind"], "uopp");
    assert_eq!(report["dims"]["n"], 30);
    assert!(report["result"]["converged"].as_bool().unwrap());
    assert!(report["result"]["final_residual_sq"].as_f64().unwrap() >= 0.0);
    assert!(report["timing"]["cpu_seconds"].as_f64().unwrap() >= 0.0);

    // Trajectory is non-increasing in the objective column.
    let objectives = trajectory_objectives(&out_a.join("trajectory.csv"));
    assert!(objectives.len() >= 2);
    for pair in objectives.windows(2) {
        assert!(pair[1] <= pair[0] + 1e-10 * (1.0 + pair[0].abs()));
    }

    // The emitted Q is a valid orthonormal frame.
    let q_text = fs::read_to_string(out_a.join("Q.csv")).unwrap();
    assert!(q_text.starts_with("10,4\n"));

    // Re-running reproduces the report except for timing.
    let out_b = tmp_dir("pipeline-out-b");
    assert_success(&run(&[
        "solve-uopp",
        "--input",
        instance.to_str().unwrap(),
        "--tau",
        "1e-8",
        "--seed",
        "5",
        "--output-dir",
        out_b.to_str().unwrap(),
    ]));
    let mut a = read_json(&out_a.join("report.json"));
    let mut b = read_json(&out_b.join("report.json"));
    a.as_object_mut().unwrap().remove("timing");
    b.as_object_mut().unwrap().remove("timing");
    assert_eq!(a, b);
    assert_eq!(
        fs::read(out_a.join("trajectory.csv")).unwrap(),
        fs::read(out_b.join("trajectory.csv")).unwrap()
    );
}

#[test]
fn solve_qpsm_reaches_the_analytic_minimum() {
    let input = tmp_dir("qpsm-input");
    fs::write(input.join("A.csv"), "2,2\n2,0\n0,0\n").unwrap();
    fs::write(input.join("B.csv"), "2,1\n0\n1\n").unwrap();
    let output = tmp_dir("qpsm-output");
    let out = run(&[
        "solve-qpsm",
        "--input",
        input.to_str().unwrap(),
        "--tau",
        "1e-9",
        "--output-dir",
        output.to_str().unwrap(),
    ]);
    assert_success(&out);
    let report = read_json(&output.join("report.json"));
    let objective = report["result"]["final_objective"].as_f64().unwrap();
    assert!((objective - (-2.0)).abs() < 1e-6, "objective {objective}");

    let w = fs::read_to_string(output.join("W.csv")).unwrap();
    let rows: Vec<&str> = w.lines().collect();
    assert_eq!(rows[0], "2,1");
    let w0: f64 = rows[1].parse().unwrap();
    let w1: f64 = rows[2].parse().unwrap();
    assert!(w0.abs() < 1e-4 && (w1 - 1.0).abs() < 1e-4);
}

#[test]
fn solve_olsr_recovers_planted_fit() {
    let (problem, _, _) = stiefel_qp::synth::planted_olsr(5, 40, 2, 77).unwrap();
    let input = tmp_dir("olsr-input");
    fs::write(
        input.join("X.csv"),
        stiefel_qp_cli::mat_io::format_matrix_csv(problem.x().as_matrix()),
    )
    .unwrap();
    fs::write(
        input.join("Y.csv"),
        stiefel_qp_cli::mat_io::format_matrix_csv(problem.y().as_matrix()),
    )
    .unwrap();
    let output = tmp_dir("olsr-output");
    let out = run(&[
        "solve-olsr",
        "--input",
        input.to_str().unwrap(),
        "--tau",
        "1e-12",
        "--kkt-tol",
        "1e-9",
        "--max-iters",
        "100000",
        "--output-dir",
        output.to_str().unwrap(),
    ]);
    assert_success(&out);
    let report = read_json(&output.join("report.json"));
    assert_eq!(report["kind"], "olsr");
    let residual_sq = report["result"]["final_residual_sq"].as_f64().unwrap();
    assert!(residual_sq < 1e-8, "residual^2 {residual_sq}");
    assert_eq!(report["result"]["bias"].as_array().unwrap().len(), 2);
    assert!(output.join("b.csv").exists());
}

#[test]
fn missing_input_exits_with_code_2() {
    let output = tmp_dir("missing-out");
    let out = run(&[
        "solve-qpsm",
        "--input",
        "/nonexistent-dir",
        "--output-dir",
        output.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn malformed_matrix_exits_with_code_2() {
    let input = tmp_dir("malformed-input");
    fs::write(input.join("A.csv"), "2,2\n1,2\n3\n").unwrap();
    fs::write(input.join("B.csv"), "2,1\n0\n1\n").unwrap();
    let output = tmp_dir("malformed-out");
    let out = run(&[
        "solve-qpsm",
        "--input",
        input.to_str().unwrap(),
        "--output-dir",
        output.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn rejected_explicit_alpha_exits_with_code_2() {
    let input = tmp_dir("alpha-input");
    fs::write(input.join("A.csv"), "2,2\n2,0\n0,0\n").unwrap();
    fs::write(input.join("B.csv"), "2,1\n0\n1\n").unwrap();
    let output = tmp_dir("alpha-out");
    let out = run(&[
        "solve-qpsm",
        "--input",
        input.to_str().unwrap(),
        "--alpha",
        "1.0",
        "--output-dir",
        output.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn iteration_cap_exits_with_code_3() {
    let instance = tmp_dir("cap-instance");
    assert_success(&run(&[
        "gen",
        "--dims",
        "40,12,4",
        "--seed",
        "1",
        "--output-dir",
        instance.to_str().unwrap(),
    ]));
    let output = tmp_dir("cap-out");
    let out = run(&[
        "solve-uopp",
        "--input",
        instance.to_str().unwrap(),
        "--tau",
        "1e-300",
        "--max-iters",
        "2",
        "--output-dir",
        output.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
    // Outputs are still written for diagnosis.
    assert!(output.join("report.json").exists());
}

#[test]
fn sweep_delta_emits_per_delta_trajectories() {
    // Six shift factors on one wide instance, mirroring the benchmark
    // protocol; every trajectory must be non-increasing and all final
    // objectives must agree.
    let output = tmp_dir("sweep-out");
    let out = bin()
        .env("STIEFEL_QP_THREADS", "2")
        .args([
            "sweep-delta",
            "--dims",
            "50,100,30",
            "--deltas",
            "1.01,1.1,1.5,2,5,10",
            "--seeds",
            "0",
            "--tau",
            "1e-6",
            "--max-iters",
            "200000",
            "--output-dir",
            output.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_success(&out);

    let summary = read_json(&output.join("summary.json"));
    assert_eq!(summary["kind"], "delta_sweep");
    assert_eq!(summary["runs"].as_array().unwrap().len(), 6);
    assert!(summary["final_objectives_agree"].as_bool().unwrap());

    for delta in ["1.01", "1.1", "1.5", "2", "5", "10"] {
        let file = output.join(format!("trajectory_delta{delta}_seed0.csv"));
        assert!(file.exists(), "missing {}", file.display());
        let objectives = trajectory_objectives(&file);
        for pair in objectives.windows(2) {
            assert!(pair[1] <= pair[0] + 1e-10 * (1.0 + pair[0].abs()));
        }
    }

    // Determinism: re-running yields the identical summary (no timing
    // fields in sweep summaries).
    let output2 = tmp_dir("sweep-out-2");
    assert_success(&run(&[
        "sweep-delta",
        "--dims",
        "50,100,30",
        "--deltas",
        "1.01,1.1,1.5,2,5,10",
        "--seeds",
        "0",
        "--tau",
        "1e-6",
        "--max-iters",
        "200000",
        "--output-dir",
        output2.to_str().unwrap(),
    ]));
    assert_eq!(
        fs::read(output.join("summary.json")).unwrap(),
        fs::read(output2.join("summary.json")).unwrap()
    );
}

#[test]
fn bench_scaling_emits_round_trippable_table() {
    let output = tmp_dir("bench-out");
    let out = run(&[
        "bench",
        "--kind",
        "scaling",
        "--n",
        "60",
        "--ks",
        "2,3",
        "--tau",
        "1e-3",
        "--output-dir",
        output.to_str().unwrap(),
    ]);
    assert_success(&out);
    let text = fs::read_to_string(output.join("timing.csv")).unwrap();
    let cells = stiefel_qp_cli::table::parse_timing_csv(&text).unwrap();
    assert_eq!(cells.len(), 2);
    assert_eq!((cells[0].n, cells[0].m, cells[0].k), (60, 60, 2));
    assert!(matches!(
        cells[0].state,
        stiefel_qp_cli::table::CellState::Done { .. }
    ));
    let record = read_json(&output.join("timing.json"));
    assert_eq!(record["kind"], "scaling");
}

#[test]
fn bench_timeout_marks_cell_with_dash() {
    let output = tmp_dir("bench-timeout-out");
    let out = run(&[
        "bench",
        "--cell",
        "300,300,10",
        "--timeout-secs",
        "0.001",
        "--output-dir",
        output.to_str().unwrap(),
    ]);
    assert_success(&out);
    let text = fs::read_to_string(output.join("timing.csv")).unwrap();
    assert!(text.contains("300,300,10,-,-,-"), "table was: {text}");
    let cells = stiefel_qp_cli::table::parse_timing_csv(&text).unwrap();
    assert!(matches!(
        cells[0].state,
        stiefel_qp_cli::table::CellState::TimedOut
    ));
}

#[test]
fn bench_lsqe_requires_k_equal_one() {
    let output = tmp_dir("lsqe-out");
    let bad = run(&[
        "bench",
        "--kind",
        "lsqe",
        "--cell",
        "50,10,2",
        "--output-dir",
        output.to_str().unwrap(),
    ]);
    assert_eq!(bad.status.code(), Some(2));

    let good = run(&[
        "bench",
        "--kind",
        "lsqe",
        "--cell",
        "50,10,1",
        "--output-dir",
        output.to_str().unwrap(),
    ]);
    assert_success(&good);
}

#[test]
fn bench_olsr_probes_pass() {
    let output = tmp_dir("bench-olsr-out");
    let out = run(&[
        "bench",
        "--kind",
        "olsr",
        "--cell",
        "40,6,2",
        "--tau",
        "1e-12",
        "--output-dir",
        output.to_str().unwrap(),
    ]);
    assert_success(&out);
    let record = read_json(&output.join("olsr.json"));
    let cell = &record["cells"][0];
    assert_eq!(cell["status"], "ok");
    assert!(cell["planted_residual"].as_f64().unwrap() < 1e-4);
    assert!(cell["translation_probe_passed"].as_bool().unwrap());
    let trajectory = cell["trajectory_file"].as_str().unwrap();
    assert!(output.join(trajectory).exists());
}
