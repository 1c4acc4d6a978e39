//! Weighted generalized Heron instances and their objectives.

use log::warn;

use crate::error::{invalid, HeronError, Result};
use crate::geometry::{common_dim, ConvexSet};
use crate::vector::Vector;

/// One term `gamma_i * d(x, C_i)` of the objective.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetTerm {
    pub set: ConvexSet,
    pub weight: f64,
}

impl TargetTerm {
    pub fn new(set: ConvexSet, weight: f64) -> Result<Self> {
        if !(weight.is_finite() && weight > 0.0) {
            return Err(invalid(format!("weight must be positive and finite, got {weight}")));
        }
        Ok(TargetTerm { set, weight })
    }
}

/// Minimize `D(x) = sum_i gamma_i d(x, C_i)` over `x` in the constraint set `S`.
#[derive(Debug, Clone, PartialEq)]
pub struct HeronProblem {
    constraint: ConvexSet,
    targets: Vec<TargetTerm>,
    dim: usize,
}

impl HeronProblem {
    /// Validates every set and weight and checks that all dimensions agree.
    ///
    /// A problem whose constraint and targets are all unbounded is accepted
    /// with a warning; objectives can still be evaluated, but the solvers
    /// refuse it.
    pub fn new(constraint: ConvexSet, targets: Vec<TargetTerm>) -> Result<Self> {
        if targets.is_empty() {
            return Err(invalid("at least one target set is required"));
        }
        constraint.validate()?;
        for t in &targets {
            t.set.validate()?;
            if !(t.weight.is_finite() && t.weight > 0.0) {
                return Err(invalid(format!("weight must be positive and finite, got {}", t.weight)));
            }
        }
        let dim = common_dim(std::iter::once(&constraint).chain(targets.iter().map(|t| &t.set)))?;
        let problem = HeronProblem {
            constraint,
            targets,
            dim,
        };
        if !problem.is_coercive() {
            warn!("no bounded set in problem: a minimizer may not exist");
        }
        Ok(problem)
    }

    /// Convenience constructor with unit weights.
    pub fn unweighted(constraint: ConvexSet, sets: Vec<ConvexSet>) -> Result<Self> {
        let targets = sets
            .into_iter()
            .map(|set| TargetTerm { set, weight: 1.0 })
            .collect();
        Self::new(constraint, targets)
    }

    pub fn constraint(&self) -> &ConvexSet {
        &self.constraint
    }

    pub fn targets(&self) -> &[TargetTerm] {
        &self.targets
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn total_weight(&self) -> f64 {
        self.targets.iter().map(|t| t.weight).sum()
    }

    /// True when `S` or some `C_i` is bounded, which guarantees a minimizer.
    pub fn is_coercive(&self) -> bool {
        self.constraint.is_bounded() || self.targets.iter().any(|t| t.set.is_bounded())
    }

    pub(crate) fn ensure_coercive(&self) -> Result<()> {
        if self.is_coercive() {
            Ok(())
        } else {
            Err(HeronError::Unbounded)
        }
    }

    /// Same instance with every weight multiplied by `factor`.
    pub fn with_scaled_weights(&self, factor: f64) -> Result<Self> {
        let targets = self
            .targets
            .iter()
            .map(|t| TargetTerm::new(t.set.clone(), t.weight * factor))
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.constraint.clone(), targets)
    }

    /// `D(x)`; `x` need not lie in `S`.
    pub fn objective(&self, x: &Vector) -> Result<f64> {
        x.check_dim(self.dim)?;
        Ok(self
            .targets
            .iter()
            .map(|t| t.weight * t.set.distance_unchecked(x))
            .sum())
    }

    /// `D_eps(x) = sum_j gamma_j sqrt(d(x, C_j)^2 + eps)`.
    pub fn objective_eps(&self, x: &Vector, eps: f64) -> Result<f64> {
        check_eps(eps)?;
        x.check_dim(self.dim)?;
        if eps == 0.0 {
            return self.objective(x);
        }
        Ok(self
            .targets
            .iter()
            .map(|t| {
                let d = t.set.distance_unchecked(x);
                t.weight * (d * d + eps).sqrt()
            })
            .sum())
    }

    /// `grad D_eps(x) = sum_j gamma_j (x - P_j(x)) / sqrt(d(x, C_j)^2 + eps)`.
    ///
    /// Requires `eps > 0`; at `eps = 0` the objective is not differentiable
    /// on the target sets.
    pub fn gradient_eps(&self, x: &Vector, eps: f64) -> Result<Vector> {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(invalid(format!("gradient requires eps > 0, got {eps}")));
        }
        x.check_dim(self.dim)?;
        let mut grad = vec![0.0; self.dim];
        for t in &self.targets {
            let p = t.set.project_unchecked(x);
            let diff = x.sub(&p);
            let d2 = diff.dot(&diff);
            let scale = t.weight / (d2 + eps).sqrt();
            for (g, r) in grad.iter_mut().zip(diff.iter()) {
                *g += scale * r;
            }
        }
        Ok(Vector::from_raw(grad))
    }
}

pub(crate) fn check_eps(eps: f64) -> Result<()> {
    if eps >= 0.0 && eps.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("eps must be nonnegative and finite, got {eps}")))
    }
}
