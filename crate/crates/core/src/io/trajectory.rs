//! Trajectory CSV export.
//!
//! Header `iteration,eps,x1,..,xd,objective,objective_eps,step_norm`, one
//! row per recorded iterate, LF line endings. Reals are written with 17
//! significant digits so every `f64` reads back exactly.

use std::fmt::Write as _;

use crate::solver::{IterateRecord, Trajectory};
use crate::vector::Vector;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("trajectory csv line {line}: {message}")]
pub struct TrajectoryCsvError {
    pub line: usize,
    pub message: String,
}

fn sci(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn trajectory_header(dim: usize) -> String {
    let mut cols = vec!["iteration".to_string(), "eps".to_string()];
    cols.extend((1..=dim).map(|i| format!("x{i}")));
    cols.extend(["objective", "objective_eps", "step_norm"].map(String::from));
    cols.join(",")
}

pub fn write_trajectory_csv(trajectory: &Trajectory, dim: usize) -> String {
    let mut out = trajectory_header(dim);
    out.push('\n');
    for r in &trajectory.records {
        let _ = write!(out, "{},{}", r.iteration, sci(r.eps));
        for c in r.x.iter() {
            let _ = write!(out, ",{}", sci(*c));
        }
        let _ = writeln!(
            out,
            ",{},{},{}",
            sci(r.objective),
            sci(r.objective_eps),
            sci(r.step_norm)
        );
    }
    out
}

pub fn read_trajectory_csv(text: &str) -> Result<Trajectory, TrajectoryCsvError> {
    let fail = |line: usize, message: String| TrajectoryCsvError { line, message };
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| fail(1, "empty file".into()))?;
    let cols: Vec<&str> = header.split(',').collect();
    if cols.len() < 6 {
        return Err(fail(1, "header has too few columns".into()));
    }
    let dim = cols.len() - 5;
    if header != trajectory_header(dim) {
        return Err(fail(1, format!("unexpected header `{header}`")));
    }
    let mut records = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != cols.len() {
            return Err(fail(line_no, format!("expected {} fields, found {}", cols.len(), fields.len())));
        }
        let iteration = fields[0]
            .parse::<usize>()
            .map_err(|_| fail(line_no, format!("bad iteration `{}`", fields[0])))?;
        let nums = fields[1..]
            .iter()
            .map(|f| f.parse::<f64>().map_err(|_| fail(line_no, format!("bad number `{f}`"))))
            .collect::<Result<Vec<f64>, _>>()?;
        let x = Vector::new(nums[1..=dim].to_vec()).map_err(|e| fail(line_no, e.to_string()))?;
        if records.last().is_some_and(|r: &IterateRecord| r.iteration >= iteration) {
            return Err(fail(line_no, "iteration indices must increase".into()));
        }
        records.push(IterateRecord {
            iteration,
            eps: nums[0],
            x,
            objective: nums[dim + 1],
            objective_eps: nums[dim + 2],
            step_norm: nums[dim + 3],
        });
    }
    Ok(Trajectory { records })
}
