//! CPU-time tables with the "-" too-slow marker, round-trippable between the
//! CSV emitted for plotting and the cell states.

use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum CellState {
    Done {
        cpu_seconds: f64,
        iterations: usize,
        final_residual_sq: f64,
    },
    /// The run exceeded the timeout; printed as "-" like the tables'
    /// takes-too-much-time marker.
    TimedOut,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingCell {
    pub n: usize,
    pub m: usize,
    pub k: usize,
    #[serde(flatten)]
    pub state: CellState,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TimingRecord {
    pub kind: String,
    pub tau: f64,
    pub seed: u64,
    pub timeout_secs: f64,
    pub cells: Vec<TimingCell>,
}

pub fn format_timing_csv(cells: &[TimingCell]) -> String {
    let mut out = String::from("n,m,k,cpu_seconds,iterations,final_residual_sq\n");
    for cell in cells {
        match &cell.state {
            CellState::Done {
                cpu_seconds,
                iterations,
                final_residual_sq,
            } => out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                cell.n, cell.m, cell.k, cpu_seconds, iterations, final_residual_sq
            )),
            CellState::TimedOut => {
                out.push_str(&format!("{},{},{},-,-,-\n", cell.n, cell.m, cell.k))
            }
        }
    }
    out
}

pub fn parse_timing_csv(text: &str) -> CliResult<Vec<TimingCell>> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| CliError::input("empty timing table"))?;
    if header != "n,m,k,cpu_seconds,iterations,final_residual_sq" {
        return Err(CliError::input(format!("bad timing header: {header:?}")));
    }
    let mut cells = Vec::new();
    for (line_no, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 6 {
            return Err(CliError::input(format!(
                "line {}: expected 6 fields, found {}",
                line_no + 2,
                fields.len()
            )));
        }
        let parse_usize = |s: &str| -> CliResult<usize> {
            s.trim()
                .parse()
                .map_err(|_| CliError::input(format!("line {}: bad integer {s:?}", line_no + 2)))
        };
        let n = parse_usize(fields[0])?;
        let m = parse_usize(fields[1])?;
        let k = parse_usize(fields[2])?;
        let state = if fields[3] == "-" {
            if fields[4] != "-" || fields[5] != "-" {
                return Err(CliError::input(format!(
                    "line {}: timed-out rows must be -,-,-",
                    line_no + 2
                )));
            }
            CellState::TimedOut
        } else {
            let cpu_seconds: f64 = fields[3].trim().parse().map_err(|_| {
                CliError::input(format!("line {}: bad time {:?}", line_no + 2, fields[3]))
            })?;
            let iterations = parse_usize(fields[4])?;
            let final_residual_sq: f64 = fields[5].trim().parse().map_err(|_| {
                CliError::input(format!("line {}: bad residual {:?}", line_no + 2, fields[5]))
            })?;
            CellState::Done {
                cpu_seconds,
                iterations,
                final_residual_sq,
            }
        };
        cells.push(TimingCell { n, m, k, state });
    }
    Ok(cells)
}
