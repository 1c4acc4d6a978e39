//! Published iterate tables for the four catalog instances, plus the
//! widened collinear instance in `data/` that reproduces the collinear rows.

use heron::io::catalog::{cubes_ball, kuhn, three_disks};
use heron::io::document::parse_problem;
use heron::solver::decade_checkpoints;
use heron::{mm_solve, subgradient_solve, SolveResult, SolverConfig, StepSizeRule, Vector};

fn assert_row(result: &SolveResult, iteration: usize, want: &[f64], tol: f64) {
    let rec = result
        .trajectory
        .as_ref()
        .and_then(|t| t.at(iteration))
        .unwrap_or_else(|| panic!("iterate {iteration} not recorded"));
    let err = rec.x.distance_inf(&Vector::from_slice(want).unwrap());
    assert!(err <= tol, "iterate {iteration}: {:.14} vs {want:?} (err {err:.2e})", rec.x);
}

#[test]
fn cubes_ball_mm_rows() {
    let e = cubes_ball();
    let cfg = SolverConfig::fixed_eps(0.0).with_tolerance(1e-15).with_max_iterations(50).recording();
    let r = mm_solve(&e.problem, &e.start, &cfg).unwrap();
    let rows: [(usize, [f64; 3]); 12] = [
        (1, [0.0, 2.0, 0.0]),
        (2, [-0.93546738305698, 1.66164748416805, 0.10207032020482]),
        (3, [-0.92881282698649, 1.63915389878166, 0.08424264751830]),
        (4, [-0.92645373003448, 1.63220797263449, 0.08007815377225]),
        (5, [-0.92567602259658, 1.63004821970935, 0.07911751670489]),
        (6, [-0.92542515217106, 1.62937435413374, 0.07889815178685]),
        (7, [-0.92534495711879, 1.62916364685109, 0.07884864943702]),
        (8, [-0.92531944712805, 1.62909766226627, 0.07883765997470]),
        (9, [-0.92531135783449, 1.62907697582185, 0.07883527888603]),
        (10, [-0.92530879826106, 1.62907048520349, 0.07883478238381]),
        (20, [-0.92530761702316, 1.62906751412014, 0.07883466748783]),
        (30, [-0.92530761701184, 1.62906751409212, 0.07883466748878]),
    ];
    for (m, x) in rows {
        assert_row(&r, m, &x, 1e-13);
    }
}

#[test]
fn cubes_ball_subgradient_rows() {
    let e = cubes_ball();
    let n = 1_000_000;
    let cfg = SolverConfig::default().with_max_iterations(n).with_checkpoints(decade_checkpoints(n));
    let r = subgradient_solve(&e.problem, &e.start, &StepSizeRule::default(), &cfg).unwrap();
    let rows: [(usize, [f64; 3], f64); 6] = [
        (10, [-0.92583298353433, 1.63051788239768, 0.07947484741743], 1e-13),
        (100, [-0.92531325048300, 1.62908232435160, 0.07883822912883], 1e-13),
        (1000, [-0.92530767419684, 1.62906766065418, 0.07883468589312], 1e-13),
        (10_000, [-0.92530761758555, 1.62906751554109, 0.07883466757273], 1e-12),
        (100_000, [-0.92530761701755, 1.62906751410641, 0.07883466748904], 1e-12),
        (1_000_000, [-0.92530761701233, 1.62906751409334, 0.07883466748881], 1e-12),
    ];
    for (m, x, tol) in rows {
        assert_row(&r, m, &x, tol);
    }
}

#[test]
fn three_disks_subgradient_rows() {
    let e = three_disks();
    let n = 1_000_000;
    let cfg = SolverConfig::default().with_max_iterations(n).with_checkpoints(decade_checkpoints(n));
    let r = subgradient_solve(&e.problem, &e.start, &StepSizeRule::default(), &cfg).unwrap();
    let rows: [(usize, [f64; 2]); 6] = [
        (10, [0.7092649, 1.2369866]),
        (100, [0.0558764, 0.9973310]),
        (1000, [0.0046862, 0.9993844]),
        (10_000, [0.0003955, 0.9999274]),
        (100_000, [0.0000334, 0.9999957]),
        (1_000_000, [0.0000028, 0.9999998]),
    ];
    for (m, x) in rows {
        assert_row(&r, m, &x, 5e-8);
    }
}

#[test]
fn kuhn_subgradient_rows() {
    let e = kuhn();
    let n = 10_000_000;
    let cfg = SolverConfig::default().with_max_iterations(n).with_checkpoints(decade_checkpoints(n));
    let r = subgradient_solve(&e.problem, &e.start, &StepSizeRule::default(), &cfg).unwrap();
    let rows: [(usize, [f64; 2]); 4] = [
        (10, [8.6984831, 0.0]),
        (1000, [1.2966354, 0.0]),
        (100_000, [0.1845171, 0.0]),
        (10_000_000, [0.0259854, 0.0]),
    ];
    for (m, x) in rows {
        assert_row(&r, m, &x, 5e-8);
    }
}

#[test]
fn widened_collinear_instance_rows() {
    let text = include_str!("../../../data/collinear-disks-wide.heron");
    let doc = parse_problem(text).unwrap();
    assert_eq!(doc.solver.project_start, Some(false));
    let start = doc.solver.start.clone().unwrap();
    let keep = |cfg: SolverConfig| cfg.keep_start();

    let cfg = keep(SolverConfig::fixed_eps(0.0).with_tolerance(1e-300).with_max_iterations(30).recording());
    let r = mm_solve(&doc.problem, &start, &cfg).unwrap();
    assert_row(&r, 1, &[1.5, 0.25], 0.0);
    assert_row(&r, 10, &[0.9941149, 0.0001308], 5e-8);
    assert_row(&r, 20, &[0.9941149, 0.0], 5e-8);
    assert_row(&r, 30, &[0.9941149, 0.0], 5e-8);
    // every point of the segment is optimal, with D = 4 for these targets
    assert!((doc.problem.objective(&r.x).unwrap() - 4.0).abs() < 1e-12);

    let n = 1_000_000;
    let cfg = keep(SolverConfig::default().with_max_iterations(n).with_checkpoints(decade_checkpoints(n)));
    let s = subgradient_solve(&doc.problem, &start, &StepSizeRule::default(), &cfg).unwrap();
    assert_row(&s, 10_000, &[0.9997648, 0.0000223], 5e-8);
    assert_row(&s, 100_000, &[0.9997648, 0.0000040], 5e-8);
    assert_row(&s, 1_000_000, &[0.9997648, 0.0000007], 5e-8);
}
