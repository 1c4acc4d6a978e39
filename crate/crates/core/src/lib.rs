//! Solvers for the Euclidean generalized Heron problem
//!
//! ```text
//! minimize  D(x) = sum_i gamma_i d(x, C_i)   subject to  x in S
//! ```
//!
//! where `S` and every `C_i` are closed convex sets with exact projections.
//! The main solver is a majorization-minimization scheme that generalizes
//! Weiszfeld's algorithm ([`mm`]); singularities are removed by smoothing
//! each distance to `sqrt(d^2 + eps)` and sending `eps` to zero through a
//! continuation schedule. A projected subgradient method ([`subgradient`])
//! is included as a baseline, and [`diagnostics`] provides optimality
//! residuals and brute-force oracles.
//!
//! ```
//! use heron::{mm_solve, ConvexSet, HeronProblem, SolverConfig, Vector};
//!
//! let disk = |x: f64, y: f64| ConvexSet::ball(Vector::from_slice(&[x, y]).unwrap(), 1.0).unwrap();
//! let problem = HeronProblem::unweighted(
//!     ConvexSet::whole_space(2).unwrap(),
//!     vec![disk(0.0, 2.0), disk(2.0, 0.0), disk(-2.0, 0.0)],
//! )
//! .unwrap();
//! let start = Vector::from_slice(&[5.0, 7.0]).unwrap();
//! let result = mm_solve(&problem, &start, &SolverConfig::default()).unwrap();
//! assert!(result.x.distance_to(&Vector::from_slice(&[0.0, 1.0]).unwrap()) < 1e-6);
//! ```

pub mod diagnostics;
pub mod error;
pub mod geometry;
pub mod io;
pub mod mm;
pub mod problem;
pub mod solver;
pub mod subgradient;
pub mod vector;

pub use diagnostics::{
    finite_difference_gradient, grid_search_oracle, optimality_residual, GridMinimum, OptimalityReport,
};
pub use error::{HeronError, Result};
pub use geometry::ConvexSet;
pub use mm::{mm_solve, mm_solve_continuation, mm_solve_fixed_eps, mm_step, mm_weights};
pub use problem::{HeronProblem, TargetTerm};
pub use solver::{EpsilonSchedule, IterateRecord, SolveResult, SolverConfig, Status, Trajectory};
pub use subgradient::{subgradient_solve, subgradient_step, StepSizeRule};
pub use vector::Vector;
