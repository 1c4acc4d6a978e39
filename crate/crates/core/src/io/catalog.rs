//! The four reference instances: five cubes and a ball in R^3, three disks,
//! two collinear disks with a disk constraint, and Kuhn's Weiszfeld-stalling
//! point set.

use crate::geometry::ConvexSet;
use crate::io::document::{Method, SolverSettings};
use crate::problem::{HeronProblem, TargetTerm};
use crate::solver::EpsilonSchedule;
use crate::vector::Vector;

#[derive(Debug, Clone, PartialEq)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub description: &'static str,
    pub problem: HeronProblem,
    pub start: Vector,
    /// Solver setup used for the reference runs.
    pub settings: SolverSettings,
    /// Box for the grid-search cross-check; contains the known solutions.
    pub oracle_box: (Vector, Vector),
}

pub const EXAMPLE_NAMES: [&str; 4] = ["cubes-ball", "three-disks", "collinear-disks", "kuhn"];

fn v(c: &[f64]) -> Vector {
    Vector::from_slice(c).expect("catalog literals are finite")
}

fn unit_disk(x: f64, y: f64) -> ConvexSet {
    ConvexSet::ball(v(&[x, y]), 1.0).expect("valid disk")
}

fn mm_settings(schedule: EpsilonSchedule, tol: f64) -> SolverSettings {
    SolverSettings {
        method: Some(Method::Mm),
        schedule: Some(schedule),
        tolerance: Some(tol),
        ..Default::default()
    }
}

pub fn cubes_ball() -> CatalogEntry {
    let centers: [[f64; 3]; 5] = [
        [0.0, -4.0, 0.0],
        [-4.0, 2.0, -3.0],
        [-3.0, -4.0, 2.0],
        [-5.0, 4.0, 4.0],
        [-1.0, 8.0, 1.0],
    ];
    let cubes = centers
        .iter()
        .map(|c| ConvexSet::cube(&v(c), 2.0).expect("valid cube"))
        .collect();
    let ball = ConvexSet::ball(v(&[0.0, 2.0, 0.0]), 1.0).expect("valid ball");
    CatalogEntry {
        name: "cubes-ball",
        description: "five cubes of side 2, constraint the unit ball at (0,2,0)",
        problem: HeronProblem::unweighted(ball, cubes).expect("valid instance"),
        start: v(&[0.0, 2.0, 0.0]),
        settings: mm_settings(EpsilonSchedule::Fixed(0.0), 1e-14),
        oracle_box: (v(&[-1.0, 1.0, -1.0]), v(&[1.0, 3.0, 1.0])),
    }
}

pub fn three_disks() -> CatalogEntry {
    CatalogEntry {
        name: "three-disks",
        description: "unit disks at (0,2), (2,0), (-2,0), unconstrained",
        problem: HeronProblem::unweighted(
            ConvexSet::whole_space(2).expect("valid"),
            vec![unit_disk(0.0, 2.0), unit_disk(2.0, 0.0), unit_disk(-2.0, 0.0)],
        )
        .expect("valid instance"),
        start: v(&[5.0, 7.0]),
        settings: mm_settings(EpsilonSchedule::default(), 1e-10),
        oracle_box: (v(&[-3.0, -3.0]), v(&[3.0, 3.0])),
    }
}

pub fn collinear_disks() -> CatalogEntry {
    CatalogEntry {
        name: "collinear-disks",
        description: "unit disks at (2,0) and (-2,0), constraint the unit disk at the origin",
        problem: HeronProblem::unweighted(
            unit_disk(0.0, 0.0),
            vec![unit_disk(2.0, 0.0), unit_disk(-2.0, 0.0)],
        )
        .expect("valid instance"),
        start: v(&[1.5, 0.25]),
        settings: mm_settings(EpsilonSchedule::Fixed(0.0), 1e-10),
        oracle_box: (v(&[-1.5, -1.5]), v(&[1.5, 1.5])),
    }
}

pub fn kuhn() -> CatalogEntry {
    let point = |x: f64, y: f64, w: f64| TargetTerm::new(ConvexSet::singleton(v(&[x, y])), w).expect("valid weight");
    CatalogEntry {
        name: "kuhn",
        description: "weights 5 at (59,0), (20,0) and 13 at (-20,48), (-20,-48); Weiszfeld stalls from (44,0)",
        problem: HeronProblem::new(
            ConvexSet::whole_space(2).expect("valid"),
            vec![
                point(59.0, 0.0, 5.0),
                point(20.0, 0.0, 5.0),
                point(-20.0, 48.0, 13.0),
                point(-20.0, -48.0, 13.0),
            ],
        )
        .expect("valid instance"),
        start: v(&[44.0, 0.0]),
        settings: mm_settings(EpsilonSchedule::default(), 1e-10),
        oracle_box: (v(&[-5.0, -5.0]), v(&[60.0, 5.0])),
    }
}

pub fn builtin_examples() -> Vec<CatalogEntry> {
    vec![cubes_ball(), three_disks(), collinear_disks(), kuhn()]
}

pub fn find_example(name: &str) -> Option<CatalogEntry> {
    builtin_examples().into_iter().find(|e| e.name == name)
}
