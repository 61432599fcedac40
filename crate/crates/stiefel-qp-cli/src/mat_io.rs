//! Matrix and trajectory file I/O.
//!
//! Matrix CSV format: a header line `rows,cols`, then one matrix row per
//! line, comma-separated, shortest round-trip decimal representation.
//! Trajectory CSV columns: `iteration,objective,residual,kkt` (residual is
//! empty for problems that have no residual form). All files are written
//! atomically (temp file + rename).

use std::fs;
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{CliError, CliResult};

pub fn atomic_write(path: &Path, contents: &str) -> CliResult<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    fs::create_dir_all(dir)?;
    let file_name = path
        .file_name()
        .ok_or_else(|| CliError::input(format!("not a file path: {}", path.display())))?
        .to_string_lossy()
        .into_owned();
    let tmp = dir.join(format!(".{file_name}.tmp-{}", std::process::id()));
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn format_matrix_csv(m: &DMatrix<f64>) -> String {
    let mut out = String::new();
    out.push_str(&format!("{},{}\n", m.nrows(), m.ncols()));
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if j > 0 {
                out.push(',');
            }
            out.push_str(&format!("{}", m[(i, j)]));
        }
        out.push('\n');
    }
    out
}

pub fn write_matrix_csv(path: &Path, m: &DMatrix<f64>) -> CliResult<()> {
    atomic_write(path, &format_matrix_csv(m))
}

pub fn parse_matrix_csv(text: &str) -> CliResult<DMatrix<f64>> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| CliError::input("empty matrix file"))?;
    let mut parts = header.split(',');
    let rows: usize = parts
        .next()
        .and_then(|s| s.trim().parse().ok())
        .ok_or_else(|| CliError::input(format!("bad matrix header: {header:?}")))?;
    let cols: usize = parts
        .next()
        .and_then(|s| s.trim().parse().ok())
        .ok_or_else(|| CliError::input(format!("bad matrix header: {header:?}")))?;
    if parts.next().is_some() {
        return Err(CliError::input(format!(
            "matrix header must be `rows,cols`, got {header:?}"
        )));
    }

    let mut data = Vec::with_capacity(rows * cols);
    let mut seen_rows = 0usize;
    for (line_no, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let mut count = 0usize;
        for field in line.split(',') {
            let value: f64 = field.trim().parse().map_err(|_| {
                CliError::input(format!("line {}: bad number {field:?}", line_no + 1))
            })?;
            data.push(value);
            count += 1;
        }
        if count != cols {
            return Err(CliError::input(format!(
                "line {}: expected {cols} columns, found {count}",
                line_no + 1
            )));
        }
        seen_rows += 1;
    }
    if seen_rows != rows {
        return Err(CliError::input(format!(
            "expected {rows} matrix rows, found {seen_rows}"
        )));
    }
    Ok(DMatrix::from_row_slice(rows, cols, &data))
}

pub fn read_matrix_csv(path: &Path) -> CliResult<DMatrix<f64>> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    parse_matrix_csv(&text)
}

pub fn format_trajectory_csv(
    objective: &[f64],
    residual: Option<&[f64]>,
    kkt: &[f64],
) -> String {
    let mut out = String::from("iteration,objective,residual,kkt\n");
    for (i, f) in objective.iter().enumerate() {
        let res = residual
            .and_then(|r| r.get(i))
            .map(|v| format!("{v}"))
            .unwrap_or_default();
        let kkt_v = kkt.get(i).map(|v| format!("{v}")).unwrap_or_default();
        out.push_str(&format!("{i},{f},{res},{kkt_v}\n"));
    }
    out
}

pub fn write_trajectory_csv(
    path: &Path,
    objective: &[f64],
    residual: Option<&[f64]>,
    kkt: &[f64],
) -> CliResult<()> {
    atomic_write(path, &format_trajectory_csv(objective, residual, kkt))
}
