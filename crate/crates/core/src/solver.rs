//! Configuration and result types shared by the MM and subgradient solvers.

use crate::error::{invalid, Result};
use crate::vector::Vector;

/// How the smoothing parameter `eps` evolves during a solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EpsilonSchedule {
    /// A single leg at constant `eps` (zero gives the unperturbed MM map).
    Fixed(f64),
    /// Legs at `eps_leg = max(start * decay^(leg - 1), floor)`, each solved to
    /// `inner_tol` and warm-started from the previous leg.
    PowerLeg {
        start: f64,
        decay: f64,
        floor: f64,
        inner_tol: f64,
    },
}

impl Default for EpsilonSchedule {
    fn default() -> Self {
        EpsilonSchedule::PowerLeg {
            start: 1e-1,
            decay: 1e-1,
            floor: 1e-16,
            inner_tol: 1e-10,
        }
    }
}

impl EpsilonSchedule {
    pub fn validate(&self) -> Result<()> {
        match *self {
            EpsilonSchedule::Fixed(eps) => {
                if eps >= 0.0 && eps.is_finite() {
                    Ok(())
                } else {
                    Err(invalid(format!("fixed eps must be nonnegative, got {eps}")))
                }
            }
            EpsilonSchedule::PowerLeg {
                start,
                decay,
                floor,
                inner_tol,
            } => {
                if !(start > 0.0 && start.is_finite()) {
                    return Err(invalid(format!("eps start must be positive, got {start}")));
                }
                if !(decay > 0.0 && decay < 1.0) {
                    return Err(invalid(format!("eps decay must lie in (0, 1), got {decay}")));
                }
                if !(floor >= 0.0 && floor <= start) {
                    return Err(invalid(format!("eps floor must lie in [0, start], got {floor}")));
                }
                if inner_tol.is_nan() || inner_tol <= 0.0 {
                    return Err(invalid("inner tolerance must be positive"));
                }
                Ok(())
            }
        }
    }

    /// The sequence of leg epsilons, ending with the floor leg. Does not
    /// include the final unperturbed polish leg.
    pub fn legs(&self) -> Vec<f64> {
        match *self {
            EpsilonSchedule::Fixed(eps) => vec![eps],
            EpsilonSchedule::PowerLeg {
                start,
                decay,
                floor,
                ..
            } => {
                let mut legs = Vec::new();
                let mut leg = 1;
                loop {
                    let raw = start * decay.powi(leg - 1);
                    // absorb rounding so 0.1 * 0.1^15 lands on a 1e-16 floor
                    let eps = if raw <= floor * (1.0 + 1e-9) { floor } else { raw };
                    legs.push(eps);
                    if eps <= floor || legs.len() >= 10_000 {
                        break;
                    }
                    leg += 1;
                }
                legs
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Upper bound on the index of the final iterate (the start is iterate 1).
    pub max_iterations: usize,
    /// Stop when `||x_{m+1} - x_m||_inf <= step_tolerance`.
    pub step_tolerance: f64,
    pub schedule: EpsilonSchedule,
    pub record_trajectory: bool,
    /// When set, only these iterate indices (plus the first and last) are
    /// recorded. Used to bound memory on long subgradient runs.
    pub checkpoints: Option<Vec<usize>>,
    /// Let the subgradient solver stop on `step_tolerance`. Off by default
    /// since subgradient steps are not monotone.
    pub subgradient_early_stop: bool,
    /// Replace the start by `P_S(x0)`. When off, an infeasible start is
    /// kept as iterate 1 and only later iterates lie in `S`.
    pub project_start: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            max_iterations: 10_000,
            step_tolerance: 1e-10,
            schedule: EpsilonSchedule::default(),
            record_trajectory: false,
            checkpoints: None,
            subgradient_early_stop: false,
            project_start: true,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations < 1 {
            return Err(invalid("max_iterations must be at least 1"));
        }
        if self.step_tolerance.is_nan() || self.step_tolerance <= 0.0 {
            return Err(invalid("step tolerance must be positive"));
        }
        self.schedule.validate()
    }

    pub fn fixed_eps(eps: f64) -> Self {
        SolverConfig {
            schedule: EpsilonSchedule::Fixed(eps),
            ..Default::default()
        }
    }

    pub fn with_max_iterations(mut self, n: usize) -> Self {
        self.max_iterations = n;
        self
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.step_tolerance = tol;
        self
    }

    pub fn recording(mut self) -> Self {
        self.record_trajectory = true;
        self
    }

    pub fn with_checkpoints(mut self, checkpoints: Vec<usize>) -> Self {
        self.record_trajectory = true;
        self.checkpoints = Some(checkpoints);
        self
    }

    pub fn keep_start(mut self) -> Self {
        self.project_start = false;
        self
    }

    pub(crate) fn should_record(&self, iteration: usize) -> bool {
        self.record_trajectory
            && self
                .checkpoints
                .as_ref()
                .is_none_or(|c| iteration == 1 || c.contains(&iteration))
    }
}

/// Iteration indices 1, 10, 100, ... up to `max`.
pub fn decade_checkpoints(max: usize) -> Vec<usize> {
    std::iter::successors(Some(1usize), |&m| m.checked_mul(10))
        .take_while(|&m| m <= max)
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterateRecord {
    pub iteration: usize,
    pub x: Vector,
    pub eps: f64,
    /// `D(x)`.
    pub objective: f64,
    /// `D_eps(x)` at this record's `eps`.
    pub objective_eps: f64,
    /// `||x_m - x_{m-1}||_inf`; zero for the first record.
    pub step_norm: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trajectory {
    pub records: Vec<IterateRecord>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn at(&self, iteration: usize) -> Option<&IterateRecord> {
        self.records
            .binary_search_by_key(&iteration, |r| r.iteration)
            .ok()
            .map(|i| &self.records[i])
    }

    pub fn last(&self) -> Option<&IterateRecord> {
        self.records.last()
    }

    pub(crate) fn push(&mut self, record: IterateRecord) {
        debug_assert!(self.records.last().is_none_or(|r| r.iteration < record.iteration));
        self.records.push(record);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Converged,
    MaxIterations,
    SingularWeight,
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Status::Converged => "converged",
            Status::MaxIterations => "max-iterations",
            Status::SingularWeight => "singular-weight",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub x: Vector,
    pub status: Status,
    /// Index of the returned iterate, counting the starting point as 1.
    pub iterations: usize,
    /// Epsilon of the leg that produced `x`.
    pub eps: f64,
    pub trajectory: Option<Trajectory>,
}
