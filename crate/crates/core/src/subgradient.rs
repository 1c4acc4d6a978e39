//! Projected subgradient baseline:
//! `x_{m+1} = P_S(x_m - eta_m sum_i gamma_i v_im)` with `v_im` the unit
//! vector from `P_i(x_m)` to `x_m`, or zero when `x_m` is in `C_i`.

use crate::error::{invalid, Result};
use crate::mm::SINGULAR_DISTANCE;
use crate::problem::HeronProblem;
use crate::solver::{IterateRecord, SolveResult, SolverConfig, Status, Trajectory};
use crate::vector::Vector;

#[derive(Debug, Clone, PartialEq)]
pub enum StepSizeRule {
    /// `eta_m = scale / m`.
    Harmonic { scale: f64 },
    /// `eta_m = steps[m - 1]`.
    Custom(Vec<f64>),
}

impl Default for StepSizeRule {
    fn default() -> Self {
        StepSizeRule::Harmonic { scale: 1.0 }
    }
}

impl StepSizeRule {
    /// Step size used to move from iterate `m` to `m + 1` (`m >= 1`).
    pub fn step(&self, m: usize) -> Option<f64> {
        match self {
            StepSizeRule::Harmonic { scale } => Some(scale / m as f64),
            StepSizeRule::Custom(steps) => steps.get(m - 1).copied(),
        }
    }

    fn validate(&self, steps_needed: usize) -> Result<()> {
        match self {
            StepSizeRule::Harmonic { scale } if *scale > 0.0 && scale.is_finite() => Ok(()),
            StepSizeRule::Harmonic { scale } => Err(invalid(format!("step scale must be positive, got {scale}"))),
            StepSizeRule::Custom(steps) => {
                if steps.iter().any(|s| !(*s > 0.0 && s.is_finite())) {
                    return Err(invalid("custom step sizes must be positive and finite"));
                }
                if steps.len() < steps_needed {
                    return Err(invalid(format!(
                        "{} step sizes given but {steps_needed} needed",
                        steps.len()
                    )));
                }
                Ok(())
            }
        }
    }
}

pub fn subgradient_step(p: &HeronProblem, x: &Vector, eta: f64) -> Result<Vector> {
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(invalid(format!("step size must be positive, got {eta}")));
    }
    x.check_dim(p.dim())?;
    Ok(step_unchecked(p, x, eta))
}

fn step_unchecked(p: &HeronProblem, x: &Vector, eta: f64) -> Vector {
    let mut direction = vec![0.0; p.dim()];
    for t in p.targets() {
        let proj = t.set.project_unchecked(x);
        let diff = x.sub(&proj);
        let d = diff.norm();
        if d <= SINGULAR_DISTANCE {
            continue;
        }
        let scale = t.weight / d;
        for (g, r) in direction.iter_mut().zip(diff.iter()) {
            *g += scale * r;
        }
    }
    let moved = x.add_scaled(-eta, &Vector::from_raw(direction));
    p.constraint().project_unchecked(&moved)
}

/// Runs from `P_S(x0)` (iterate 1) up to iterate `cfg.max_iterations`.
///
/// Termination is budget-driven and reported as [`Status::MaxIterations`]
/// unless `cfg.subgradient_early_stop` is set and a step falls below
/// `cfg.step_tolerance`. With `cfg.checkpoints` only the listed iterates and
/// the final one are recorded.
pub fn subgradient_solve(
    p: &HeronProblem,
    x0: &Vector,
    rule: &StepSizeRule,
    cfg: &SolverConfig,
) -> Result<SolveResult> {
    cfg.validate()?;
    rule.validate(cfg.max_iterations - 1)?;
    p.ensure_coercive()?;
    x0.check_dim(p.dim())?;
    if !x0.is_finite() {
        return Err(invalid("starting point must be finite"));
    }
    let mut x = if cfg.project_start {
        p.constraint().project_unchecked(x0)
    } else {
        x0.clone()
    };
    let mut trajectory = cfg.record_trajectory.then(Trajectory::default);
    let record = |t: &mut Option<Trajectory>, m: usize, x: &Vector, step: f64| -> Result<()> {
        if let Some(t) = t.as_mut() {
            let objective = p.objective(x)?;
            t.push(IterateRecord {
                iteration: m,
                x: x.clone(),
                eps: 0.0,
                objective,
                objective_eps: objective,
                step_norm: step,
            });
        }
        Ok(())
    };
    if cfg.should_record(1) {
        record(&mut trajectory, 1, &x, 0.0)?;
    }

    let mut m = 1;
    let mut status = Status::MaxIterations;
    while m < cfg.max_iterations {
        let eta = rule.step(m).expect("validated step list");
        let next = step_unchecked(p, &x, eta);
        let step = next.distance_inf(&x);
        x = next;
        m += 1;
        let early = cfg.subgradient_early_stop && step <= cfg.step_tolerance;
        if cfg.should_record(m) || ((m == cfg.max_iterations || early) && cfg.record_trajectory) {
            record(&mut trajectory, m, &x, step)?;
        }
        if early {
            status = Status::Converged;
            break;
        }
    }
    Ok(SolveResult {
        x,
        status,
        iterations: m,
        eps: 0.0,
        trajectory,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ConvexSet;

    fn v(c: &[f64]) -> Vector {
        Vector::from_slice(c).unwrap()
    }

    fn three_disks() -> HeronProblem {
        let disk = |x: f64, y: f64| ConvexSet::ball(v(&[x, y]), 1.0).unwrap();
        HeronProblem::unweighted(
            ConvexSet::whole_space(2).unwrap(),
            vec![disk(0.0, 2.0), disk(2.0, 0.0), disk(-2.0, 0.0)],
        )
        .unwrap()
    }

    #[test]
    fn members_of_every_target_do_not_move() {
        let p = HeronProblem::unweighted(
            ConvexSet::whole_space(2).unwrap(),
            vec![
                ConvexSet::ball(v(&[0.0, 0.0]), 1.0).unwrap(),
                ConvexSet::ball(v(&[0.5, 0.0]), 1.0).unwrap(),
            ],
        )
        .unwrap();
        let x = v(&[0.2, 0.3]);
        assert_eq!(subgradient_step(&p, &x, 0.7).unwrap(), x);
    }

    #[test]
    fn three_disks_iterate_ten() {
        let cfg = SolverConfig::default().with_max_iterations(10);
        let r = subgradient_solve(&three_disks(), &v(&[5.0, 7.0]), &StepSizeRule::default(), &cfg).unwrap();
        assert_eq!(r.iterations, 10);
        assert_eq!(r.status, Status::MaxIterations);
        assert!((r.x[0] - 0.7092649).abs() < 1e-6, "{}", r.x);
        assert!((r.x[1] - 1.2369866).abs() < 1e-6, "{}", r.x);
    }

    #[test]
    fn axis_symmetry_is_preserved() {
        let cfg = SolverConfig::default().with_max_iterations(2000).recording();
        let r = subgradient_solve(&three_disks(), &v(&[0.0, 7.0]), &StepSizeRule::default(), &cfg).unwrap();
        for rec in &r.trajectory.unwrap().records {
            assert!(rec.x[0].abs() <= 1e-12);
        }
    }

    #[test]
    fn custom_steps() {
        let rule = StepSizeRule::Custom(vec![0.5, 0.25]);
        assert_eq!(rule.step(2), Some(0.25));
        let cfg = SolverConfig::default().with_max_iterations(3);
        assert!(subgradient_solve(&three_disks(), &v(&[5.0, 7.0]), &rule, &cfg).is_ok());
        let cfg = SolverConfig::default().with_max_iterations(4);
        assert!(subgradient_solve(&three_disks(), &v(&[5.0, 7.0]), &rule, &cfg).is_err());
        assert!(subgradient_step(&three_disks(), &v(&[5.0, 7.0]), 0.0).is_err());
    }

    #[test]
    fn early_stop_is_opt_in() {
        let p = HeronProblem::unweighted(
            ConvexSet::ball(v(&[0.0, 0.0]), 1.0).unwrap(),
            vec![ConvexSet::ball(v(&[0.5, 0.0]), 1.0).unwrap()],
        )
        .unwrap();
        let mut cfg = SolverConfig::default().with_max_iterations(100);
        let r = subgradient_solve(&p, &v(&[0.0, 0.0]), &StepSizeRule::default(), &cfg).unwrap();
        assert_eq!((r.status, r.iterations), (Status::MaxIterations, 100));
        cfg.subgradient_early_stop = true;
        let r = subgradient_solve(&p, &v(&[0.0, 0.0]), &StepSizeRule::default(), &cfg).unwrap();
        assert_eq!((r.status, r.iterations), (Status::Converged, 2));
    }

    #[test]
    fn checkpoints_bound_the_trajectory() {
        let cfg = SolverConfig::default()
            .with_max_iterations(1500)
            .with_checkpoints(crate::solver::decade_checkpoints(1500));
        let r = subgradient_solve(&three_disks(), &v(&[5.0, 7.0]), &StepSizeRule::default(), &cfg).unwrap();
        let its: Vec<usize> = r.trajectory.unwrap().records.iter().map(|r| r.iteration).collect();
        assert_eq!(its, vec![1, 10, 100, 1000, 1500]);
    }

    #[test]
    fn kept_start_is_iterate_one() {
        let p = HeronProblem::unweighted(
            ConvexSet::ball(v(&[0.0, 0.0]), 1.0).unwrap(),
            vec![ConvexSet::singleton(v(&[0.0, 0.0]))],
        )
        .unwrap();
        let cfg = SolverConfig::default().with_max_iterations(2).recording().keep_start();
        let r = subgradient_solve(&p, &v(&[3.0, 0.0]), &StepSizeRule::default(), &cfg).unwrap();
        let t = r.trajectory.unwrap();
        assert_eq!(t.records[0].x, v(&[3.0, 0.0]));
        // unit subgradient step from (3, 0), then projection onto S
        assert_eq!(t.records[1].x, v(&[1.0, 0.0]));
    }
}
