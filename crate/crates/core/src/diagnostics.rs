//! Optimality certificates and independent oracles.
//!
//! `y` in `S` minimizes the smooth `D_eps` over `S` iff
//! `<grad D_eps(y), x - y> >= 0` for every `x` in `S`, which for convex `S`
//! is the same as `y = P_S(y - t grad D_eps(y))` for any `t > 0`. The
//! residual reported here is the sup-norm violation of that fixed point.

use rayon::prelude::*;

use crate::error::{invalid, HeronError, Result};
use crate::problem::HeronProblem;
use crate::vector::Vector;

/// Residual at or below which a point is reported as certified.
pub const CERTIFY_TOLERANCE: f64 = 1e-6;

/// Feasibility slack accepted by [`optimality_residual`].
pub const FEASIBILITY_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimalityReport {
    pub residual: f64,
    pub eps_used: f64,
    pub probe_step: f64,
    pub tolerance: f64,
    pub certified: bool,
}

/// `||x - P_S(x - probe_step * grad D_eps(x))||_inf`, certified against
/// [`CERTIFY_TOLERANCE`].
pub fn optimality_residual(
    p: &HeronProblem,
    x: &Vector,
    eps: f64,
    probe_step: f64,
) -> Result<OptimalityReport> {
    optimality_residual_with_tolerance(p, x, eps, probe_step, CERTIFY_TOLERANCE)
}

pub fn optimality_residual_with_tolerance(
    p: &HeronProblem,
    x: &Vector,
    eps: f64,
    probe_step: f64,
    tolerance: f64,
) -> Result<OptimalityReport> {
    if !(probe_step > 0.0 && probe_step.is_finite()) {
        return Err(invalid(format!("probe step must be positive, got {probe_step}")));
    }
    if tolerance.is_nan() || tolerance < 0.0 {
        return Err(invalid("tolerance must be nonnegative"));
    }
    x.check_dim(p.dim())?;
    let infeasibility = p.constraint().distance(x)?;
    if infeasibility > FEASIBILITY_TOLERANCE {
        return Err(invalid(format!(
            "point is not in the constraint set (distance {infeasibility:e})"
        )));
    }
    let grad = p.gradient_eps(x, eps)?;
    let probe = p.constraint().project(&x.add_scaled(-probe_step, &grad))?;
    let residual = x.distance_inf(&probe);
    Ok(OptimalityReport {
        residual,
        eps_used: eps,
        probe_step,
        tolerance,
        certified: residual <= tolerance,
    })
}

/// Central differences of `D_eps` with step `h` in each coordinate.
pub fn finite_difference_gradient(p: &HeronProblem, x: &Vector, eps: f64, h: f64) -> Result<Vector> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(invalid(format!("difference step must be positive, got {h}")));
    }
    x.check_dim(p.dim())?;
    let mut probe = x.clone().into_vec();
    let mut grad = Vec::with_capacity(p.dim());
    for i in 0..p.dim() {
        let base = probe[i];
        probe[i] = base + h;
        let up = p.objective_eps(&Vector::from_raw(probe.clone()), eps)?;
        probe[i] = base - h;
        let down = p.objective_eps(&Vector::from_raw(probe.clone()), eps)?;
        probe[i] = base;
        grad.push((up - down) / (2.0 * h));
    }
    Ok(Vector::from_raw(grad))
}

pub const MAX_GRID_DIM: usize = 3;
pub const MAX_GRID_RESOLUTION: usize = 2001;

#[derive(Debug, Clone, PartialEq)]
pub struct GridMinimum {
    pub point: Vector,
    pub objective: f64,
    /// Largest per-axis grid spacing; also the feasibility slack used.
    pub spacing: f64,
}

/// Exhaustive search of `D` over a regular grid on the box
/// `[lower, upper]` with `resolution` points per axis.
///
/// Grid points within one spacing of `S` count as feasible. Ties go to the
/// lexicographically smallest grid index, so the answer does not depend on
/// how the work is split across threads.
pub fn grid_search_oracle(
    p: &HeronProblem,
    lower: &Vector,
    upper: &Vector,
    resolution: usize,
) -> Result<GridMinimum> {
    let d = p.dim();
    if d > MAX_GRID_DIM {
        return Err(invalid(format!("grid search supports d <= {MAX_GRID_DIM}, got {d}")));
    }
    if !(2..=MAX_GRID_RESOLUTION).contains(&resolution) {
        return Err(invalid(format!(
            "resolution must lie in [2, {MAX_GRID_RESOLUTION}], got {resolution}"
        )));
    }
    lower.check_dim(d)?;
    upper.check_dim(d)?;
    if (0..d).any(|i| lower[i] > upper[i]) {
        return Err(invalid("grid box lower corner exceeds upper corner"));
    }

    let steps: Vec<f64> = (0..d)
        .map(|i| (upper[i] - lower[i]) / (resolution - 1) as f64)
        .collect();
    let spacing = steps.iter().cloned().fold(0.0, f64::max);
    let coord = |axis: usize, k: usize| lower[axis] + steps[axis] * k as f64;
    let inner: usize = resolution.pow(d as u32 - 1);

    let best = (0..resolution)
        .into_par_iter()
        .filter_map(|first| {
            let mut x = Vector::zeros(d);
            x.as_mut_slice()[0] = coord(0, first);
            let mut best: Option<(f64, usize)> = None;
            for rest in 0..inner {
                let mut r = rest;
                let point = x.as_mut_slice();
                for axis in (1..d).rev() {
                    point[axis] = coord(axis, r % resolution);
                    r /= resolution;
                }
                if p.constraint().distance_unchecked(&x) > spacing {
                    continue;
                }
                let value = p.objective(&x).expect("dimension checked");
                let index = first * inner + rest;
                if best.is_none_or(|(v, _)| value < v) {
                    best = Some((value, index));
                }
            }
            best
        })
        .reduce_with(|a, b| match a.0.total_cmp(&b.0) {
            std::cmp::Ordering::Less => a,
            std::cmp::Ordering::Greater => b,
            std::cmp::Ordering::Equal => {
                if a.1 <= b.1 {
                    a
                } else {
                    b
                }
            }
        });

    let (objective, index) = best.ok_or(HeronError::EmptyGrid)?;
    let mut point = vec![0.0; d];
    let mut r = index;
    for axis in (0..d).rev() {
        point[axis] = coord(axis, r % resolution);
        r /= resolution;
    }
    Ok(GridMinimum {
        point: Vector::from_raw(point),
        objective,
        spacing,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ConvexSet;
    use crate::problem::TargetTerm;

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
    fn far_point_is_not_certified() {
        let r = optimality_residual(&three_disks(), &v(&[5.0, 7.0]), 1e-12, 1.0).unwrap();
        assert!(r.residual > 1e-2);
        assert!(!r.certified);
    }

    #[test]
    fn residual_argument_checks() {
        let p = HeronProblem::unweighted(
            ConvexSet::ball(v(&[0.0, 0.0]), 1.0).unwrap(),
            vec![ConvexSet::singleton(v(&[3.0, 0.0]))],
        )
        .unwrap();
        assert!(optimality_residual(&p, &v(&[2.0, 0.0]), 1e-12, 1.0).is_err());
        assert!(optimality_residual(&p, &v(&[0.0, 0.0]), 0.0, 1.0).is_err());
        assert!(optimality_residual(&p, &v(&[0.0, 0.0]), 1e-12, 0.0).is_err());
        // boundary point nearest the target is optimal
        let r = optimality_residual(&p, &v(&[1.0, 0.0]), 1e-12, 1.0).unwrap();
        assert!(r.certified, "{r:?}");
    }

    #[test]
    fn kuhn_origin_is_certified() {
        let pt = |x: f64, y: f64, w: f64| TargetTerm::new(ConvexSet::singleton(v(&[x, y])), w).unwrap();
        let p = HeronProblem::new(
            ConvexSet::whole_space(2).unwrap(),
            vec![pt(59.0, 0.0, 5.0), pt(20.0, 0.0, 5.0), pt(-20.0, 48.0, 13.0), pt(-20.0, -48.0, 13.0)],
        )
        .unwrap();
        let r = optimality_residual(&p, &v(&[0.0, 0.0]), 1e-12, 1.0).unwrap();
        assert!(r.residual <= 1e-6, "{r:?}");
    }

    #[test]
    fn three_disk_touching_optimum_needs_the_eps_minimizer() {
        // (0, 1) touches the top disk, where the eps-smoothed term is flat, so
        // the residual there is the pull of the two side disks, 2/sqrt(5).
        let p = three_disks();
        let eps = 1e-12;
        let at_touch = optimality_residual(&p, &v(&[0.0, 1.0]), eps, 1.0).unwrap();
        assert!((at_touch.residual - 2.0 / 5f64.sqrt()).abs() < 1e-12);
        // The D_eps minimizer on the axis, located by bisection on the
        // vertical derivative, sits about 2 sqrt(eps) below (0, 1).
        let dy = |y: f64| p.gradient_eps(&v(&[0.0, y]), eps).unwrap()[1];
        let (mut lo, mut hi) = (0.9, 1.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if dy(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert!((1.0 - lo - 2.0 * eps.sqrt()).abs() < 1e-7, "{lo}");
        let at_min = optimality_residual(&p, &v(&[0.0, lo]), eps, 1.0).unwrap();
        assert!(at_min.certified, "{at_min:?}");
    }

    #[test]
    fn fd_gradient_single_point_and_symmetry() {
        let p0 = v(&[1.0, -2.0]);
        let single = HeronProblem::unweighted(
            ConvexSet::whole_space(2).unwrap(),
            vec![ConvexSet::singleton(p0.clone())],
        )
        .unwrap();
        let (eps, h) = (1e-2, 1e-6);
        let g = finite_difference_gradient(&single, &p0, eps, h).unwrap();
        assert!(g.norm_inf() <= 2.0 * h / eps.sqrt());

        let p = three_disks();
        for t in [-3.0, 0.5, 4.0] {
            let g = finite_difference_gradient(&p, &v(&[0.0, t]), 1e-3, 1e-6).unwrap();
            assert!(g[0].abs() <= 1e-9, "{g}");
        }
        assert!(finite_difference_gradient(&p, &v(&[0.0, 0.0]), 1e-3, 0.0).is_err());
    }

    #[test]
    fn grid_three_disks() {
        let g = grid_search_oracle(&three_disks(), &v(&[-3.0, -3.0]), &v(&[3.0, 3.0]), 601).unwrap();
        assert!(g.point.distance_to(&v(&[0.0, 1.0])) <= 0.02, "{}", g.point);
        assert!((g.spacing - 0.01).abs() < 1e-15);
    }

    #[test]
    fn grid_collinear_disks_has_flat_minimum() {
        let disk = |x: f64| ConvexSet::ball(v(&[x, 0.0]), 1.0).unwrap();
        let p = HeronProblem::unweighted(ConvexSet::ball(v(&[0.0, 0.0]), 1.0).unwrap(), vec![disk(2.0), disk(-2.0)])
            .unwrap();
        let g = grid_search_oracle(&p, &v(&[-1.5, -1.5]), &v(&[1.5, 1.5]), 601).unwrap();
        assert!((g.objective - 2.0).abs() <= 1e-6);
        assert!(g.point[1].abs() <= 0.01);
    }

    #[test]
    fn grid_argument_checks() {
        let p = three_disks();
        assert!(grid_search_oracle(&p, &v(&[-1.0, -1.0]), &v(&[1.0, 1.0]), 1).is_err());
        assert!(grid_search_oracle(&p, &v(&[-1.0, -1.0]), &v(&[1.0, 1.0]), 2002).is_err());
        assert!(grid_search_oracle(&p, &v(&[1.0, -1.0]), &v(&[-1.0, 1.0]), 11).is_err());
        let far = HeronProblem::unweighted(
            ConvexSet::ball(v(&[10.0, 10.0]), 1.0).unwrap(),
            vec![ConvexSet::singleton(v(&[0.0, 0.0]))],
        )
        .unwrap();
        assert_eq!(
            grid_search_oracle(&far, &v(&[-1.0, -1.0]), &v(&[1.0, 1.0]), 11),
            Err(HeronError::EmptyGrid)
        );
        let four_d = HeronProblem::unweighted(
            ConvexSet::whole_space(4).unwrap(),
            vec![ConvexSet::singleton(Vector::zeros(4))],
        )
        .unwrap();
        assert!(grid_search_oracle(&four_d, &Vector::zeros(4), &Vector::zeros(4), 3).is_err());
    }
}
