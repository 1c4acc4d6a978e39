//! Problem documents, trajectory export and the built-in example catalog.

pub mod catalog;
pub mod document;
pub mod trajectory;

use crate::error::Result;
use crate::mm::mm_solve;
use crate::problem::HeronProblem;
use crate::solver::{decade_checkpoints, SolveResult, SolverConfig};
use crate::subgradient::{subgradient_solve, StepSizeRule};
use crate::vector::Vector;

use document::{Method, SolverSettings};

/// Runs the solver described by `settings`, filling unset fields with the
/// library defaults. The start defaults to the origin (projected onto `S`).
///
/// MM runs record every iterate when `record` is set; subgradient runs
/// record decade checkpoints and the final iterate.
pub fn run_settings(problem: &HeronProblem, settings: &SolverSettings, record: bool) -> Result<SolveResult> {
    let mut cfg = SolverConfig::default();
    if let Some(schedule) = settings.schedule {
        cfg.schedule = schedule;
    }
    if let Some(n) = settings.max_iterations {
        cfg.max_iterations = n;
    }
    if let Some(t) = settings.tolerance {
        cfg.step_tolerance = t;
    }
    if let Some(b) = settings.project_start {
        cfg.project_start = b;
    }
    let start = settings.start.clone().unwrap_or_else(|| Vector::zeros(problem.dim()));
    match settings.method.unwrap_or(Method::Mm) {
        Method::Mm => {
            cfg.record_trajectory = record;
            mm_solve(problem, &start, &cfg)
        }
        Method::Subgradient => {
            if record {
                let checkpoints = decade_checkpoints(cfg.max_iterations);
                cfg = cfg.with_checkpoints(checkpoints);
            }
            let rule = StepSizeRule::Harmonic {
                scale: settings.step_scale.unwrap_or(1.0),
            };
            subgradient_solve(problem, &start, &rule, &cfg)
        }
    }
}
