//! Closed convex sets with exact Euclidean projections.
//!
//! Every variant here has a closed-form or sort-based projection, so
//! distances `d(x, C) = ||x - P_C(x)||` are exact up to rounding. Points
//! already in a set are returned unchanged by [`ConvexSet::project`].

use crate::error::{invalid, HeronError, Result};
use crate::vector::Vector;

#[derive(Debug, Clone, PartialEq)]
pub enum ConvexSet {
    Singleton { point: Vector },
    Ball { center: Vector, radius: f64 },
    /// Axis-aligned box `lower <= x <= upper`.
    Box { lower: Vector, upper: Vector },
    /// `{x : <normal, x> <= offset}`.
    Halfspace { normal: Vector, offset: f64 },
    /// `{x : <normal, x> = offset}`.
    Hyperplane { normal: Vector, offset: f64 },
    /// `{x >= 0 : sum(x) = scale}`.
    Simplex { dim: usize, scale: f64 },
    /// `{x : ||x - center||_1 <= radius}`.
    L1Ball { center: Vector, radius: f64 },
    WholeSpace { dim: usize },
}

impl ConvexSet {
    pub fn singleton(point: Vector) -> Self {
        ConvexSet::Singleton { point }
    }

    pub fn ball(center: Vector, radius: f64) -> Result<Self> {
        let set = ConvexSet::Ball { center, radius };
        set.validate()?;
        Ok(set)
    }

    pub fn cube(center: &Vector, side: f64) -> Result<Self> {
        let half = side / 2.0;
        let lower = Vector::new(center.iter().map(|c| c - half).collect())?;
        let upper = Vector::new(center.iter().map(|c| c + half).collect())?;
        Self::boxed(lower, upper)
    }

    pub fn boxed(lower: Vector, upper: Vector) -> Result<Self> {
        let set = ConvexSet::Box { lower, upper };
        set.validate()?;
        Ok(set)
    }

    pub fn halfspace(normal: Vector, offset: f64) -> Result<Self> {
        let set = ConvexSet::Halfspace { normal, offset };
        set.validate()?;
        Ok(set)
    }

    pub fn hyperplane(normal: Vector, offset: f64) -> Result<Self> {
        let set = ConvexSet::Hyperplane { normal, offset };
        set.validate()?;
        Ok(set)
    }

    pub fn simplex(dim: usize, scale: f64) -> Result<Self> {
        let set = ConvexSet::Simplex { dim, scale };
        set.validate()?;
        Ok(set)
    }

    pub fn l1_ball(center: Vector, radius: f64) -> Result<Self> {
        let set = ConvexSet::L1Ball { center, radius };
        set.validate()?;
        Ok(set)
    }

    pub fn whole_space(dim: usize) -> Result<Self> {
        let set = ConvexSet::WholeSpace { dim };
        set.validate()?;
        Ok(set)
    }

    /// Checks the construction invariants. The enum is public so values can
    /// be built directly; [`crate::HeronProblem::new`] re-validates.
    pub fn validate(&self) -> Result<()> {
        let finite_positive = |r: f64, what: &str| {
            if r.is_finite() && r > 0.0 {
                Ok(())
            } else {
                Err(invalid(format!("{what} must be positive and finite, got {r}")))
            }
        };
        match self {
            ConvexSet::Singleton { point } => check_finite(point),
            ConvexSet::Ball { center, radius } | ConvexSet::L1Ball { center, radius } => {
                check_finite(center)?;
                finite_positive(*radius, "radius")
            }
            ConvexSet::Box { lower, upper } => {
                check_finite(lower)?;
                check_finite(upper)?;
                upper.check_dim(lower.dim())?;
                if let Some(i) = (0..lower.dim()).find(|&i| lower[i] > upper[i]) {
                    return Err(invalid(format!(
                        "box lower bound exceeds upper bound in coordinate {i}"
                    )));
                }
                Ok(())
            }
            ConvexSet::Halfspace { normal, offset } | ConvexSet::Hyperplane { normal, offset } => {
                check_finite(normal)?;
                if !offset.is_finite() {
                    return Err(invalid("offset must be finite"));
                }
                if normal.iter().all(|&c| c == 0.0) {
                    return Err(invalid("normal vector must be nonzero"));
                }
                Ok(())
            }
            ConvexSet::Simplex { dim, scale } => {
                if *dim == 0 {
                    return Err(invalid("simplex dimension must be positive"));
                }
                finite_positive(*scale, "simplex scale")
            }
            ConvexSet::WholeSpace { dim } => {
                if *dim == 0 {
                    Err(invalid("dimension must be positive"))
                } else {
                    Ok(())
                }
            }
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            ConvexSet::Singleton { point } => point.dim(),
            ConvexSet::Ball { center, .. } | ConvexSet::L1Ball { center, .. } => center.dim(),
            ConvexSet::Box { lower, .. } => lower.dim(),
            ConvexSet::Halfspace { normal, .. } | ConvexSet::Hyperplane { normal, .. } => {
                normal.dim()
            }
            ConvexSet::Simplex { dim, .. } | ConvexSet::WholeSpace { dim } => *dim,
        }
    }

    pub fn is_bounded(&self) -> bool {
        !matches!(
            self,
            ConvexSet::Halfspace { .. } | ConvexSet::Hyperplane { .. } | ConvexSet::WholeSpace { .. }
        )
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            ConvexSet::Singleton { .. } => "singleton",
            ConvexSet::Ball { .. } => "ball",
            ConvexSet::Box { .. } => "box",
            ConvexSet::Halfspace { .. } => "halfspace",
            ConvexSet::Hyperplane { .. } => "hyperplane",
            ConvexSet::Simplex { .. } => "simplex",
            ConvexSet::L1Ball { .. } => "l1ball",
            ConvexSet::WholeSpace { .. } => "whole-space",
        }
    }

    /// Euclidean projection `P_C(x) = argmin_{y in C} ||x - y||`.
    pub fn project(&self, x: &Vector) -> Result<Vector> {
        x.check_dim(self.dim())?;
        Ok(self.project_unchecked(x))
    }

    /// `d(x, C) = ||x - P_C(x)||`; exactly zero for members.
    pub fn distance(&self, x: &Vector) -> Result<f64> {
        let p = self.project(x)?;
        Ok(x.distance_to(&p))
    }

    pub fn contains(&self, x: &Vector, tol: f64) -> Result<bool> {
        if tol.is_nan() || tol < 0.0 {
            return Err(invalid("tolerance must be nonnegative"));
        }
        Ok(self.distance(x)? <= tol)
    }

    pub(crate) fn project_unchecked(&self, x: &Vector) -> Vector {
        match self {
            ConvexSet::Singleton { point } => point.clone(),
            ConvexSet::Ball { center, radius } => {
                let diff = x.sub(center);
                let n = diff.norm();
                if n <= *radius {
                    x.clone()
                } else {
                    center.add_scaled(radius / n, &diff)
                }
            }
            ConvexSet::Box { lower, upper } => Vector::from_raw(
                x.iter()
                    .zip(lower.iter().zip(upper.iter()))
                    .map(|(&v, (&lo, &hi))| v.clamp(lo, hi))
                    .collect(),
            ),
            ConvexSet::Halfspace { normal, offset } => {
                let excess = normal.dot(x) - offset;
                if excess <= 0.0 {
                    x.clone()
                } else {
                    x.add_scaled(-excess / normal.dot(normal), normal)
                }
            }
            ConvexSet::Hyperplane { normal, offset } => {
                let excess = normal.dot(x) - offset;
                if excess == 0.0 {
                    x.clone()
                } else {
                    x.add_scaled(-excess / normal.dot(normal), normal)
                }
            }
            ConvexSet::Simplex { scale, .. } => {
                if x.iter().all(|&v| v >= 0.0) && x.iter().sum::<f64>() == *scale {
                    x.clone()
                } else {
                    Vector::from_raw(project_simplex(x.as_slice(), *scale))
                }
            }
            ConvexSet::L1Ball { center, radius } => {
                let diff = x.sub(center);
                if diff.norm1() <= *radius {
                    return x.clone();
                }
                let magnitudes: Vec<f64> = diff.iter().map(|v| v.abs()).collect();
                let shrunk = project_simplex(&magnitudes, *radius);
                Vector::from_raw(
                    center
                        .iter()
                        .zip(diff.iter().zip(shrunk))
                        .map(|(&c, (&d, s))| c + s.copysign(d))
                        .collect(),
                )
            }
            ConvexSet::WholeSpace { .. } => x.clone(),
        }
    }

    /// Same arithmetic as `x.distance_to(&self.project_unchecked(x))`
    /// without allocating for the closed-form kinds.
    pub(crate) fn distance_unchecked(&self, x: &Vector) -> f64 {
        let xs = x.as_slice();
        let gap = |p: &dyn Fn(usize) -> f64| -> f64 {
            xs.iter()
                .enumerate()
                .map(|(i, &v)| (v - p(i)) * (v - p(i)))
                .sum::<f64>()
                .sqrt()
        };
        match self {
            ConvexSet::Singleton { point } => x.distance_to(point),
            ConvexSet::Ball { center, radius } => {
                let c = center.as_slice();
                let n = xs.iter().zip(c).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
                if n <= *radius {
                    0.0
                } else {
                    let f = radius / n;
                    gap(&|i| c[i] + f * (xs[i] - c[i]))
                }
            }
            ConvexSet::Box { lower, upper } => gap(&|i| xs[i].clamp(lower[i], upper[i])),
            ConvexSet::Halfspace { normal, offset } | ConvexSet::Hyperplane { normal, offset } => {
                let excess = normal.dot(x) - offset;
                let inside = match self {
                    ConvexSet::Halfspace { .. } => excess <= 0.0,
                    _ => excess == 0.0,
                };
                if inside {
                    0.0
                } else {
                    let f = -excess / normal.dot(normal);
                    gap(&|i| xs[i] + f * normal[i])
                }
            }
            ConvexSet::WholeSpace { .. } => 0.0,
            ConvexSet::Simplex { .. } | ConvexSet::L1Ball { .. } => x.distance_to(&self.project_unchecked(x)),
        }
    }
}

fn check_finite(v: &Vector) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(invalid("set parameters must be finite"))
    }
}

/// Projection onto `{w >= 0 : sum(w) = scale}` by sorting and thresholding.
///
/// With `u` sorted in decreasing order, the active count is the largest `j`
/// with `u_j > (sum_{i<=j} u_i - scale) / j`; every coordinate is then
/// shifted by that threshold and clipped at zero.
pub(crate) fn project_simplex(v: &[f64], scale: f64) -> Vec<f64> {
    let mut sorted = v.to_vec();
    sorted.sort_unstable_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (j, &u) in sorted.iter().enumerate() {
        cumsum += u;
        let t = (cumsum - scale) / (j + 1) as f64;
        if u - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|&x| (x - theta).max(0.0)).collect()
}

/// Dimension shared by `sets`, or an error if they disagree.
pub(crate) fn common_dim<'a>(sets: impl IntoIterator<Item = &'a ConvexSet>) -> Result<usize> {
    let mut dim = None;
    for set in sets {
        match dim {
            None => dim = Some(set.dim()),
            Some(d) if d != set.dim() => {
                return Err(HeronError::DimensionMismatch {
                    expected: d,
                    found: set.dim(),
                })
            }
            _ => {}
        }
    }
    dim.ok_or_else(|| invalid("no sets given"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn v(c: &[f64]) -> Vector {
        Vector::from_slice(c).unwrap()
    }

    /// Brute-force projection onto the 2-d simplex: dense scan of the
    /// segment {(t, s - t)} followed by successive local refinement.
    fn simplex_grid_oracle(x: &[f64; 2], scale: f64) -> [f64; 2] {
        let objective = |t: f64| (x[0] - t).powi(2) + (x[1] - (scale - t)).powi(2);
        let (mut lo, mut hi) = (0.0f64, scale);
        let mut best = 0.0;
        while hi - lo > 1e-9 {
            let n = 1000;
            let step = (hi - lo) / n as f64;
            let mut best_val = f64::INFINITY;
            for i in 0..=n {
                let t = lo + step * i as f64;
                let val = objective(t);
                if val < best_val {
                    best_val = val;
                    best = t;
                }
            }
            lo = (best - step).max(0.0);
            hi = (best + step).min(scale);
        }
        [best, scale - best]
    }

    #[test]
    fn ball_projection_is_radial() {
        let ball = ConvexSet::ball(v(&[0.0, 2.0, 0.0]), 1.0).unwrap();
        assert_eq!(ball.project(&v(&[0.0, 4.0, 0.0])).unwrap(), v(&[0.0, 3.0, 0.0]));
    }

    #[test]
    fn cube_projection_clamps() {
        let cube = ConvexSet::cube(&v(&[0.0, -4.0, 0.0]), 2.0).unwrap();
        assert_eq!(
            cube,
            ConvexSet::boxed(v(&[-1.0, -5.0, -1.0]), v(&[1.0, -3.0, 1.0])).unwrap()
        );
        let x = v(&[0.0, 2.0, 0.0]);
        assert_eq!(cube.project(&x).unwrap(), v(&[0.0, -3.0, 0.0]));
        assert_eq!(cube.distance(&x).unwrap(), 5.0);
    }

    #[test]
    fn simplex_projection_matches_grid_oracle() {
        let oracle = simplex_grid_oracle(&[0.9, 0.7], 1.0);
        let simplex = ConvexSet::simplex(2, 1.0).unwrap();
        let p = simplex.project(&v(&[0.9, 0.7])).unwrap();
        assert!((p[0] - oracle[0]).abs() < 1e-8 && (p[1] - oracle[1]).abs() < 1e-8);
        // frozen from the oracle run
        assert!((p[0] - 0.6).abs() < 1e-12 && (p[1] - 0.4).abs() < 1e-12);
    }

    #[test]
    fn simplex_projection_clips_negative_coordinates() {
        let simplex = ConvexSet::simplex(2, 1.0).unwrap();
        for x in [[3.0, -1.0], [-2.0, 0.5], [0.2, 0.1]] {
            let oracle = simplex_grid_oracle(&x, 1.0);
            let p = simplex.project(&v(&x)).unwrap();
            assert!((p[0] - oracle[0]).abs() < 1e-8, "{x:?}: {p} vs {oracle:?}");
            assert!((p[1] - oracle[1]).abs() < 1e-8);
        }
    }

    #[test]
    fn distance_examples() {
        let ball = ConvexSet::ball(v(&[0.0, 2.0]), 1.0).unwrap();
        let d = ball.distance(&v(&[5.0, 7.0])).unwrap();
        // ||(5,5)|| - 1
        assert!((d - (5.0 * 2f64.sqrt() - 1.0)).abs() < 1e-14);
        assert_eq!(ball.distance(&v(&[0.3, 2.2])).unwrap(), 0.0);
    }

    #[test]
    fn contains_examples() {
        let unit = ConvexSet::ball(v(&[0.0, 0.0]), 1.0).unwrap();
        assert!(unit.contains(&v(&[1.0, 0.0]), 0.0).unwrap());
        assert!(!unit.contains(&v(&[1.1, 0.0]), 0.05).unwrap());
        let half = ConvexSet::halfspace(v(&[1.0, 0.0]), 0.0).unwrap();
        assert!(half.contains(&v(&[-3.0, 9.0]), 0.0).unwrap());
        assert!(unit.contains(&v(&[1.0, 0.0]), -1.0).is_err());
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let ball = ConvexSet::ball(v(&[0.0, 0.0]), 1.0).unwrap();
        assert_eq!(
            ball.project(&v(&[1.0, 2.0, 3.0])),
            Err(HeronError::DimensionMismatch { expected: 2, found: 3 })
        );
        assert!(ball.distance(&v(&[1.0])).is_err());
    }

    #[test]
    fn invalid_sets_are_rejected() {
        assert!(ConvexSet::ball(v(&[0.0]), 0.0).is_err());
        assert!(ConvexSet::ball(v(&[0.0]), -1.0).is_err());
        assert!(ConvexSet::boxed(v(&[1.0, 0.0]), v(&[0.0, 1.0])).is_err());
        assert!(ConvexSet::boxed(v(&[0.0]), v(&[0.0, 1.0])).is_err());
        assert!(ConvexSet::halfspace(v(&[0.0, 0.0]), 1.0).is_err());
        assert!(ConvexSet::hyperplane(v(&[0.0]), 1.0).is_err());
        assert!(ConvexSet::simplex(0, 1.0).is_err());
        assert!(ConvexSet::simplex(3, 0.0).is_err());
        assert!(ConvexSet::l1_ball(v(&[0.0]), f64::NAN).is_err());
        assert!(ConvexSet::whole_space(0).is_err());
    }

    #[test]
    fn l1_ball_projection_restores_signs() {
        let ball = ConvexSet::l1_ball(v(&[1.0, 1.0]), 1.0).unwrap();
        // |x - c| = (2, 3) -> simplex(1) projection (0, 1) -> c + (0, -1)
        let p = ball.project(&v(&[3.0, -2.0])).unwrap();
        assert!((p[0] - 1.0).abs() < 1e-15 && (p[1] - 0.0).abs() < 1e-15);
        assert_eq!(ball.project(&v(&[1.2, 0.9])).unwrap(), v(&[1.2, 0.9]));
    }

    #[test]
    fn hyperplane_projection() {
        let plane = ConvexSet::hyperplane(v(&[0.0, 2.0]), 2.0).unwrap();
        assert_eq!(plane.project(&v(&[5.0, -3.0])).unwrap(), v(&[5.0, 1.0]));
        let half = ConvexSet::halfspace(v(&[0.0, 2.0]), 2.0).unwrap();
        assert_eq!(half.project(&v(&[5.0, -3.0])).unwrap(), v(&[5.0, -3.0]));
        assert_eq!(half.project(&v(&[5.0, 4.0])).unwrap(), v(&[5.0, 1.0]));
    }

    fn arb_point(dim: usize) -> impl Strategy<Value = Vector> {
        prop::collection::vec(-10.0f64..10.0, dim).prop_map(|c| Vector::new(c).unwrap())
    }

    fn arb_set(dim: usize) -> impl Strategy<Value = ConvexSet> {
        prop_oneof![
            arb_point(dim).prop_map(ConvexSet::singleton),
            (arb_point(dim), 0.1f64..5.0).prop_map(|(c, r)| ConvexSet::ball(c, r).unwrap()),
            (arb_point(dim), prop::collection::vec(0.0f64..4.0, dim)).prop_map(|(lo, w)| {
                let hi = Vector::new(lo.iter().zip(&w).map(|(a, b)| a + b).collect()).unwrap();
                ConvexSet::boxed(lo, hi).unwrap()
            }),
            (arb_point(dim), -5.0f64..5.0)
                .prop_filter("nonzero normal", |(n, _)| n.norm() > 1e-3)
                .prop_map(|(n, b)| ConvexSet::halfspace(n, b).unwrap()),
            (arb_point(dim), -5.0f64..5.0)
                .prop_filter("nonzero normal", |(n, _)| n.norm() > 1e-3)
                .prop_map(|(n, b)| ConvexSet::hyperplane(n, b).unwrap()),
            (0.1f64..5.0).prop_map(move |s| ConvexSet::simplex(dim, s).unwrap()),
            (arb_point(dim), 0.1f64..5.0).prop_map(|(c, r)| ConvexSet::l1_ball(c, r).unwrap()),
            Just(ConvexSet::whole_space(dim).unwrap()),
        ]
    }

    fn set_and_points() -> impl Strategy<Value = (ConvexSet, Vector, Vector)> {
        (1usize..6).prop_flat_map(|d| (arb_set(d), arb_point(d), arb_point(d)))
    }

    proptest! {
        #[test]
        fn projection_is_idempotent((set, x, _) in set_and_points()) {
            let p = set.project(&x).unwrap();
            let pp = set.project(&p).unwrap();
            prop_assert!(p.distance_inf(&pp) <= 1e-14 * (1.0 + p.norm_inf()));
        }

        #[test]
        fn projection_is_nonexpansive((set, x, y) in set_and_points()) {
            let px = set.project(&x).unwrap();
            let py = set.project(&y).unwrap();
            prop_assert!(px.distance_to(&py) <= x.distance_to(&y) + 1e-12);
        }

        #[test]
        fn distance_matches_projection((set, x, _) in set_and_points()) {
            let p = set.project(&x).unwrap();
            prop_assert!((set.distance(&x).unwrap() - x.distance_to(&p)).abs() <= 1e-14);
            prop_assert!(set.contains(&p, 1e-12).unwrap());
        }
    }
}
