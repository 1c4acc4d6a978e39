//! Majorization-minimization for the generalized Heron problem.
//!
//! Around the current iterate `x_m` each distance is majorized by
//! `d(x, C_i) <= ||x - P_i(x_m)||`, and the square root by its tangent line,
//! giving a quadratic surrogate whose minimizer over `S` is
//!
//! ```text
//! x_{m+1} = P_S( sum_i alpha_i P_i(x_m) ),   alpha_i = w_i / sum_j w_j,
//! w_i     = gamma_i / sqrt(||x_m - P_i(x_m)||^2 + eps).
//! ```
//!
//! With `eps = 0` this is the generalized Weiszfeld map and breaks down when
//! an iterate enters some `C_i`. A positive `eps` smooths the objective to
//! `D_eps` and removes the singularity; [`mm_solve_continuation`] drives
//! `eps` towards zero, warm-starting each leg from the last.

use log::debug;

use crate::error::{HeronError, Result};
use crate::problem::{check_eps, HeronProblem};
use crate::solver::{EpsilonSchedule, IterateRecord, SolveResult, SolverConfig, Status, Trajectory};
use crate::vector::Vector;

/// Distances below this are treated as membership when `eps = 0`.
pub const SINGULAR_DISTANCE: f64 = 1e-13;

/// Projections of `x` onto every target together with the convex weights `alpha_i`.
#[derive(Debug, Clone)]
pub struct MmWeights {
    pub projections: Vec<Vector>,
    pub alphas: Vec<f64>,
}

pub fn mm_weights(p: &HeronProblem, x: &Vector, eps: f64) -> Result<MmWeights> {
    check_eps(eps)?;
    x.check_dim(p.dim())?;
    let mut projections = Vec::with_capacity(p.targets().len());
    let mut weights = Vec::with_capacity(p.targets().len());
    for (i, t) in p.targets().iter().enumerate() {
        let proj = t.set.project_unchecked(x);
        let d2 = crate::vector::squared_distance(x.as_slice(), proj.as_slice());
        if eps == 0.0 && d2.sqrt() < SINGULAR_DISTANCE {
            return Err(HeronError::SingularWeight {
                target: i,
                distance: d2.sqrt(),
            });
        }
        weights.push(t.weight / (d2 + eps).sqrt());
        projections.push(proj);
    }
    let total: f64 = weights.iter().sum();
    let alphas = weights.into_iter().map(|w| w / total).collect();
    Ok(MmWeights { projections, alphas })
}

/// One MM update `P_S(sum_i alpha_i P_i(x))`.
///
/// Fails with [`HeronError::SingularWeight`] when `eps = 0` and `x` lies
/// within [`SINGULAR_DISTANCE`] of some target.
pub fn mm_step(p: &HeronProblem, x: &Vector, eps: f64) -> Result<Vector> {
    let MmWeights { projections, alphas } = mm_weights(p, x, eps)?;
    let mut combo = vec![0.0; p.dim()];
    for (proj, alpha) in projections.iter().zip(&alphas) {
        for (c, v) in combo.iter_mut().zip(proj.iter()) {
            *c += alpha * v;
        }
    }
    Ok(p.constraint().project_unchecked(&Vector::from_raw(combo)))
}

/// Iterates [`mm_step`] at fixed `eps` from `P_S(x0)` (or `x0`, see
/// [`SolverConfig::project_start`]) until the sup-norm step
/// falls to `cfg.step_tolerance` or `cfg.max_iterations` is reached.
///
/// A singular weight is reported through [`Status::SingularWeight`] with
/// the last valid iterate.
pub fn mm_solve_fixed_eps(
    p: &HeronProblem,
    x0: &Vector,
    eps: f64,
    cfg: &SolverConfig,
) -> Result<SolveResult> {
    check_eps(eps)?;
    let mut run = Run::start(p, x0, eps, cfg)?;
    let status = run.leg(eps, cfg.step_tolerance)?;
    Ok(run.finish(status, eps))
}

/// Solves a sequence of perturbed problems with decreasing `eps`, then
/// polishes at `eps = 0`.
///
/// Leg `l` uses `max(start * decay^(l-1), floor)` and stops at the
/// schedule's inner tolerance. The polish leg stops at
/// `cfg.step_tolerance`; if it hits a singular weight the floor-leg answer
/// is returned as converged. Iteration indices run on across legs.
pub fn mm_solve_continuation(p: &HeronProblem, x0: &Vector, cfg: &SolverConfig) -> Result<SolveResult> {
    let inner_tol = match cfg.schedule {
        EpsilonSchedule::PowerLeg { inner_tol, .. } => inner_tol,
        EpsilonSchedule::Fixed(_) => {
            return Err(crate::error::invalid("continuation requires a power-leg schedule"))
        }
    };
    let legs = cfg.schedule.legs();
    let mut run = Run::start(p, x0, legs[0], cfg)?;
    for &eps in &legs {
        let status = run.leg(eps, inner_tol)?;
        debug!("leg eps={eps:e} ended at iterate {} ({status})", run.iteration);
        match status {
            Status::Converged => {}
            Status::MaxIterations => return Ok(run.finish(Status::MaxIterations, eps)),
            // only reachable with a zero floor
            Status::SingularWeight => return Ok(run.finish(Status::Converged, eps)),
        }
    }
    let floor_eps = *legs.last().expect("schedule has at least one leg");
    let floor_x = run.x.clone();
    let floor_iteration = run.iteration;
    let status = run.leg(0.0, cfg.step_tolerance)?;
    debug!("polish leg ended at iterate {} ({status})", run.iteration);
    match status {
        Status::Converged => Ok(run.finish(Status::Converged, 0.0)),
        Status::MaxIterations => Ok(run.finish(Status::MaxIterations, 0.0)),
        Status::SingularWeight => {
            let trajectory = run.trajectory.take();
            Ok(SolveResult {
                x: floor_x,
                status: Status::Converged,
                iterations: floor_iteration,
                eps: floor_eps,
                trajectory,
            })
        }
    }
}

/// Dispatches on the configured schedule.
pub fn mm_solve(p: &HeronProblem, x0: &Vector, cfg: &SolverConfig) -> Result<SolveResult> {
    match cfg.schedule {
        EpsilonSchedule::Fixed(eps) => mm_solve_fixed_eps(p, x0, eps, cfg),
        EpsilonSchedule::PowerLeg { .. } => mm_solve_continuation(p, x0, cfg),
    }
}

struct Run<'a> {
    problem: &'a HeronProblem,
    cfg: &'a SolverConfig,
    x: Vector,
    iteration: usize,
    trajectory: Option<Trajectory>,
}

impl<'a> Run<'a> {
    fn start(p: &'a HeronProblem, x0: &Vector, eps: f64, cfg: &'a SolverConfig) -> Result<Self> {
        cfg.validate()?;
        p.ensure_coercive()?;
        x0.check_dim(p.dim())?;
        if !x0.is_finite() {
            return Err(crate::error::invalid("starting point must be finite"));
        }
        let x = if cfg.project_start {
            p.constraint().project_unchecked(x0)
        } else {
            x0.clone()
        };
        let mut run = Run {
            problem: p,
            cfg,
            x,
            iteration: 1,
            trajectory: cfg.record_trajectory.then(Trajectory::default),
        };
        run.record(eps, 0.0)?;
        Ok(run)
    }

    fn record(&mut self, eps: f64, step_norm: f64) -> Result<()> {
        if !self.cfg.should_record(self.iteration) {
            return Ok(());
        }
        let record = IterateRecord {
            iteration: self.iteration,
            x: self.x.clone(),
            eps,
            objective: self.problem.objective(&self.x)?,
            objective_eps: self.problem.objective_eps(&self.x, eps)?,
            step_norm,
        };
        if let Some(t) = self.trajectory.as_mut() {
            t.push(record);
        }
        Ok(())
    }

    fn leg(&mut self, eps: f64, tol: f64) -> Result<Status> {
        while self.iteration < self.cfg.max_iterations {
            let next = match mm_step(self.problem, &self.x, eps) {
                Ok(next) => next,
                Err(HeronError::SingularWeight { .. }) => return Ok(Status::SingularWeight),
                Err(e) => return Err(e),
            };
            let step = next.distance_inf(&self.x);
            self.x = next;
            self.iteration += 1;
            self.record(eps, step)?;
            if step <= tol {
                return Ok(Status::Converged);
            }
        }
        Ok(Status::MaxIterations)
    }

    fn finish(self, status: Status, eps: f64) -> SolveResult {
        SolveResult {
            x: self.x,
            status,
            iterations: self.iteration,
            eps,
            trajectory: self.trajectory,
        }
    }
}
