//! Command-line front end for the `heron` solvers.
//!
//! Exit codes: 0 converged, 1 input or I/O error, 2 iteration limit,
//! 3 singular weight.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use heron::diagnostics::{optimality_residual, CERTIFY_TOLERANCE};
use heron::io::catalog::{builtin_examples, find_example, EXAMPLE_NAMES};
use heron::io::document::{build_schedule, parse_problem, Method, SolverSettings};
use heron::io::run_settings;
use heron::io::trajectory::write_trajectory_csv;
use heron::{grid_search_oracle, EpsilonSchedule, HeronProblem, SolveResult, Status, Vector};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_MAX_ITERATIONS: i32 = 2;
pub const EXIT_SINGULAR: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "heron", version, about = "Generalized Heron problem solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve the problem in a document.
    Solve {
        file: PathBuf,
        #[command(flatten)]
        opts: SolveOpts,
    },
    /// Solve a built-in example.
    Example {
        /// One of cubes-ball, three-disks, collinear-disks, kuhn.
        #[arg(required_unless_present = "all")]
        name: Option<String>,
        /// Run every built-in example in turn.
        #[arg(long, conflicts_with_all = ["name", "trajectory"])]
        all: bool,
        #[command(flatten)]
        opts: SolveOpts,
    },
    /// Report the optimality residual at a point.
    Check {
        #[command(flatten)]
        source: Source,
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        /// Smoothing used in the residual.
        #[arg(long, default_value_t = 1e-12)]
        eps: f64,
        #[arg(long, default_value_t = 1.0)]
        probe_step: f64,
    },
    /// Brute-force grid minimum of D over a box.
    Oracle {
        #[command(flatten)]
        source: Source,
        /// `lo:hi` for every axis, or `lo1:hi1,lo2:hi2,...` per axis.
        #[arg(long = "box", allow_hyphen_values = true)]
        bounds: Option<String>,
        #[arg(long, default_value_t = 601)]
        resolution: usize,
    },
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct Source {
    file: Option<PathBuf>,
    /// Use a built-in example instead of a file.
    #[arg(long)]
    example: Option<String>,
}

#[derive(Debug, Args)]
struct SolveOpts {
    #[arg(long)]
    method: Option<Method>,
    #[arg(long, allow_hyphen_values = true)]
    start: Option<String>,
    /// First leg epsilon; 0 selects the unperturbed fixed-eps solver.
    #[arg(long)]
    eps_start: Option<f64>,
    #[arg(long)]
    eps_decay: Option<f64>,
    #[arg(long)]
    eps_floor: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    /// Write every recorded iterate to this CSV file.
    #[arg(long)]
    trajectory: Option<PathBuf>,
}

#[derive(Debug)]
struct InputError(String);

impl<E: std::fmt::Display> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, InputError>;

/// Parses `args` (including the program name) and runs the command,
/// writing the report to `out`. Returns the process exit code.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(InputError(msg)) => {
            eprintln!("error: {msg}");
            EXIT_INPUT
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write) -> CliResult<i32> {
    match command {
        Command::Solve { file, opts } => {
            let text = std::fs::read_to_string(&file).map_err(|e| format!("{}: {e}", file.display()))?;
            let doc = parse_problem(&text).map_err(|e| format!("{}: {e}", file.display()))?;
            solve_and_report(&file.display().to_string(), &doc.problem, doc.solver, &opts, out)
        }
        Command::Example { name, all, opts } => {
            if all {
                let mut worst = EXIT_OK;
                for entry in builtin_examples() {
                    let settings = entry_settings(&entry);
                    let code = solve_and_report(entry.name, &entry.problem, settings, &opts, out)?;
                    writeln!(out)?;
                    worst = worst.max(code);
                }
                return Ok(worst);
            }
            let name = name.unwrap_or_default();
            let entry = lookup(&name)?;
            let settings = entry_settings(&entry);
            solve_and_report(entry.name, &entry.problem, settings, &opts, out)
        }
        Command::Check {
            source,
            point,
            eps,
            probe_step,
        } => {
            let problem = load_source(&source)?.0;
            let x = parse_point(&point)?;
            let report = optimality_residual(&problem, &x, eps, probe_step)?;
            writeln!(out, "point = {x:.14}")?;
            writeln!(out, "objective = {:.14}", problem.objective(&x)?)?;
            writeln!(out, "residual = {:.6e}", report.residual)?;
            writeln!(out, "eps = {:e}", report.eps_used)?;
            writeln!(out, "probe_step = {}", report.probe_step)?;
            writeln!(out, "tolerance = {:e}", report.tolerance)?;
            writeln!(out, "certified = {}", report.certified)?;
            Ok(EXIT_OK)
        }
        Command::Oracle {
            source,
            bounds,
            resolution,
        } => {
            let (problem, default_box) = load_source(&source)?;
            let (lower, upper) = match bounds {
                Some(b) => parse_box(&b, problem.dim())?,
                None => default_box.ok_or_else(|| "--box is required for problem files".to_string())?,
            };
            let grid = grid_search_oracle(&problem, &lower, &upper, resolution)?;
            writeln!(out, "point = {:.14}", grid.point)?;
            writeln!(out, "objective = {:.14}", grid.objective)?;
            writeln!(out, "spacing = {:e}", grid.spacing)?;
            Ok(EXIT_OK)
        }
    }
}

fn lookup(name: &str) -> CliResult<heron::io::catalog::CatalogEntry> {
    find_example(name).ok_or_else(|| {
        InputError(format!("unknown example `{name}` (available: {})", EXAMPLE_NAMES.join(", ")))
    })
}

fn entry_settings(entry: &heron::io::catalog::CatalogEntry) -> SolverSettings {
    SolverSettings {
        start: Some(entry.start.clone()),
        ..entry.settings.clone()
    }
}

fn load_source(source: &Source) -> CliResult<(HeronProblem, Option<(Vector, Vector)>)> {
    if let Some(name) = &source.example {
        let entry = lookup(name)?;
        return Ok((entry.problem, Some(entry.oracle_box)));
    }
    let file = source.file.as_ref().expect("clap enforces one source");
    let text = std::fs::read_to_string(file).map_err(|e| format!("{}: {e}", file.display()))?;
    let doc = parse_problem(&text).map_err(|e| format!("{}: {e}", file.display()))?;
    Ok((doc.problem, None))
}

fn parse_point(s: &str) -> CliResult<Vector> {
    let coords = s
        .split(',')
        .map(|c| c.trim().parse::<f64>().map_err(|_| format!("malformed coordinate `{c}`")))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Vector::new(coords)?)
}

fn parse_box(s: &str, dim: usize) -> CliResult<(Vector, Vector)> {
    let axes = s
        .split(',')
        .map(|axis| {
            let (lo, hi) = axis
                .split_once(':')
                .ok_or_else(|| format!("box axis `{axis}` is not `lo:hi`"))?;
            let parse = |v: &str| v.trim().parse::<f64>().map_err(|_| format!("malformed bound `{v}`"));
            Ok((parse(lo)?, parse(hi)?))
        })
        .collect::<Result<Vec<_>, String>>()?;
    let axes = match axes.len() {
        1 => vec![axes[0]; dim],
        n if n == dim => axes,
        n => return Err(InputError(format!("box has {n} axes, problem has dimension {dim}"))),
    };
    let lower = Vector::new(axes.iter().map(|a| a.0).collect())?;
    let upper = Vector::new(axes.iter().map(|a| a.1).collect())?;
    Ok((lower, upper))
}

fn apply_overrides(mut settings: SolverSettings, opts: &SolveOpts) -> CliResult<SolverSettings> {
    if let Some(m) = opts.method {
        settings.method = Some(m);
    }
    if let Some(s) = &opts.start {
        settings.start = Some(parse_point(s)?);
    }
    if let Some(n) = opts.max_iter {
        settings.max_iterations = Some(n);
    }
    if let Some(t) = opts.tol {
        settings.tolerance = Some(t);
    }
    if opts.eps_start.is_some() || opts.eps_decay.is_some() || opts.eps_floor.is_some() {
        let (start, decay, floor, inner) = match settings.schedule {
            Some(EpsilonSchedule::PowerLeg {
                start,
                decay,
                floor,
                inner_tol,
            }) => (start, Some(decay), Some(floor), Some(inner_tol)),
            Some(EpsilonSchedule::Fixed(eps)) if eps > 0.0 => (eps, None, None, None),
            _ => (0.1, None, None, None),
        };
        let start = opts.eps_start.unwrap_or(start);
        settings.schedule = Some(build_schedule(
            start,
            opts.eps_decay.or(decay),
            opts.eps_floor.or(floor),
            inner,
        ));
    }
    Ok(settings)
}

fn solve_and_report(
    label: &str,
    problem: &HeronProblem,
    settings: SolverSettings,
    opts: &SolveOpts,
    out: &mut dyn Write,
) -> CliResult<i32> {
    let settings = apply_overrides(settings, opts)?;
    if let Some(start) = &settings.start {
        if start.dim() != problem.dim() {
            return Err(InputError(format!(
                "start has dimension {}, problem has dimension {}",
                start.dim(),
                problem.dim()
            )));
        }
    }
    let result = run_settings(problem, &settings, opts.trajectory.is_some())?;
    if let (Some(path), Some(traj)) = (&opts.trajectory, &result.trajectory) {
        std::fs::write(path, write_trajectory_csv(traj, problem.dim()))
            .map_err(|e| format!("{}: {e}", path.display()))?;
    }
    report(label, problem, &settings, &result, out)?;
    Ok(match result.status {
        Status::Converged => EXIT_OK,
        Status::MaxIterations => EXIT_MAX_ITERATIONS,
        Status::SingularWeight => EXIT_SINGULAR,
    })
}

fn report(
    label: &str,
    problem: &HeronProblem,
    settings: &SolverSettings,
    result: &SolveResult,
    out: &mut dyn Write,
) -> CliResult<()> {
    let objective = problem.objective(&result.x)?;
    writeln!(out, "problem = {label}")?;
    writeln!(out, "method = {}", settings.method.unwrap_or(Method::Mm))?;
    writeln!(out, "x = {:.14}", result.x)?;
    let exact: Vec<String> = result.x.iter().map(|c| format!("{c:.16e}")).collect();
    writeln!(out, "x_exact = {}", exact.join(","))?;
    writeln!(out, "objective = {objective:.14}")?;
    writeln!(out, "status = {}", result.status)?;
    writeln!(out, "iterations = {}", result.iterations)?;
    writeln!(out, "eps = {:e}", result.eps)?;
    if result.status == Status::Converged {
        let check = optimality_residual(problem, &result.x, result.eps.max(1e-12), 1.0)?;
        writeln!(
            out,
            "residual = {:.3e} ({} at {:e})",
            check.residual,
            if check.certified { "certified" } else { "not certified" },
            CERTIFY_TOLERANCE
        )?;
    }
    Ok(())
}
