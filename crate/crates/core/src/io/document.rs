//! Plain-text problem documents.
//!
//! ```text
//! heron-problem 1
//! dimension = 2
//!
//! [constraint]
//! kind = whole-space
//!
//! [target]
//! kind = ball
//! center = 0, 2
//! radius = 1
//! weight = 1
//!
//! [solver]
//! method = mm
//! start = 5, 7
//! eps-start = 0.1
//! ```
//!
//! The first non-comment line is the versioned header. `#` starts a comment.
//! Each `[target]` stanza adds one weighted set; exactly one `[constraint]`
//! is required and `[solver]` is optional. Set kinds and their keys:
//!
//! | kind          | keys                    |
//! |---------------|-------------------------|
//! | `singleton`   | `point`                 |
//! | `ball`        | `center`, `radius`      |
//! | `box`         | `lower`, `upper`        |
//! | `cube`        | `center`, `side`        |
//! | `halfspace`   | `normal`, `offset`      |
//! | `hyperplane`  | `normal`, `offset`      |
//! | `simplex`     | `scale`                 |
//! | `l1ball`      | `center`, `radius`      |
//! | `whole-space` | (none)                  |
//!
//! `weight` (default 1) is only valid in targets. Solver keys: `method`
//! (`mm` or `subgradient`), `start`, `eps` (fixed), `eps-start`,
//! `eps-decay`, `eps-floor`, `inner-tol`, `max-iter`, `tol`, `step-scale`,
//! `project-start` (`true` or `false`; default `true`).
//! `eps-start = 0` selects the unperturbed fixed-eps solver.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use crate::geometry::ConvexSet;
use crate::problem::{HeronProblem, TargetTerm};
use crate::solver::EpsilonSchedule;
use crate::vector::Vector;

pub const HEADER: &str = "heron-problem";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseErrorKind {
    BadHeader,
    UnknownSection,
    UnknownSetKind,
    UnknownKey,
    DuplicateKey,
    MissingKey,
    MalformedNumber,
    DimensionMismatch,
    NonpositiveWeight,
    NonpositiveRadius,
    InvalidSet,
    ConstraintCount,
    NoTargets,
    Syntax,
    InvalidSolverSetting,
}

impl ParseErrorKind {
    pub fn code(&self) -> &'static str {
        match self {
            ParseErrorKind::BadHeader => "E01",
            ParseErrorKind::UnknownSection => "E02",
            ParseErrorKind::UnknownSetKind => "E03",
            ParseErrorKind::UnknownKey => "E04",
            ParseErrorKind::DuplicateKey => "E05",
            ParseErrorKind::MissingKey => "E06",
            ParseErrorKind::MalformedNumber => "E07",
            ParseErrorKind::DimensionMismatch => "E08",
            ParseErrorKind::NonpositiveWeight => "E09",
            ParseErrorKind::NonpositiveRadius => "E10",
            ParseErrorKind::InvalidSet => "E11",
            ParseErrorKind::ConstraintCount => "E12",
            ParseErrorKind::NoTargets => "E13",
            ParseErrorKind::Syntax => "E14",
            ParseErrorKind::InvalidSolverSetting => "E15",
        }
    }
}

/// A problem-document error at a 1-based line and column.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("line {line}, column {column}: [{}] {message}", kind.code())]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Mm,
    Subgradient,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Mm => "mm",
            Method::Subgradient => "subgradient",
        })
    }
}

impl std::str::FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "mm" => Ok(Method::Mm),
            "subgradient" | "subgrad" => Ok(Method::Subgradient),
            other => Err(format!("unknown method `{other}` (expected mm or subgradient)")),
        }
    }
}

/// Optional `[solver]` section. Unset fields fall back to caller defaults.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SolverSettings {
    pub method: Option<Method>,
    pub start: Option<Vector>,
    pub schedule: Option<EpsilonSchedule>,
    pub max_iterations: Option<usize>,
    pub tolerance: Option<f64>,
    pub step_scale: Option<f64>,
    pub project_start: Option<bool>,
}

impl SolverSettings {
    fn is_empty(&self) -> bool {
        *self == SolverSettings::default()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemDocument {
    pub problem: HeronProblem,
    pub solver: SolverSettings,
}

#[derive(Debug, Clone)]
struct Entry {
    line: usize,
    key_col: usize,
    value_col: usize,
    value: String,
}

#[derive(Debug)]
struct Stanza {
    name: String,
    line: usize,
    entries: BTreeMap<String, Entry>,
}

fn err(line: usize, column: usize, kind: ParseErrorKind, message: impl Into<String>) -> ParseError {
    ParseError {
        line,
        column,
        kind,
        message: message.into(),
    }
}

pub fn parse_problem(text: &str) -> Result<ProblemDocument, ParseError> {
    let mut header_seen = false;
    let mut preamble: BTreeMap<String, Entry> = BTreeMap::new();
    let mut stanzas: Vec<Stanza> = Vec::new();
    let mut last_line = 1;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let content = raw.split('#').next().unwrap_or("");
        let trimmed = content.trim();
        if trimmed.is_empty() {
            continue;
        }
        let indent = content.len() - content.trim_start().len();
        let col = indent + 1;

        if !header_seen {
            let mut parts = trimmed.split_whitespace();
            let ok = parts.next() == Some(HEADER)
                && parts.next() == Some(FORMAT_VERSION.to_string().as_str())
                && parts.next().is_none();
            if !ok {
                return Err(err(
                    line_no,
                    col,
                    ParseErrorKind::BadHeader,
                    format!("expected header `{HEADER} {FORMAT_VERSION}`, found `{trimmed}`"),
                ));
            }
            header_seen = true;
            continue;
        }

        if let Some(rest) = trimmed.strip_prefix('[') {
            let Some(name) = rest.strip_suffix(']') else {
                return Err(err(line_no, col, ParseErrorKind::Syntax, "unterminated section header"));
            };
            let name = name.trim();
            if !matches!(name, "constraint" | "target" | "solver") {
                return Err(err(
                    line_no,
                    col + 1,
                    ParseErrorKind::UnknownSection,
                    format!("unknown section `{name}`"),
                ));
            }
            stanzas.push(Stanza {
                name: name.to_string(),
                line: line_no,
                entries: BTreeMap::new(),
            });
            continue;
        }

        let Some(eq) = content.find('=') else {
            return Err(err(line_no, col, ParseErrorKind::Syntax, "expected `key = value`"));
        };
        let key = content[..eq].trim().to_string();
        if key.is_empty() {
            return Err(err(line_no, col, ParseErrorKind::Syntax, "missing key before `=`"));
        }
        let after = &content[eq + 1..];
        let value_offset = eq + 1 + (after.len() - after.trim_start().len());
        let entry = Entry {
            line: line_no,
            key_col: col,
            value_col: value_offset + 1,
            value: after.trim().to_string(),
        };
        let target = match stanzas.last_mut() {
            Some(s) => &mut s.entries,
            None => &mut preamble,
        };
        if target.contains_key(&key) {
            return Err(err(
                line_no,
                col,
                ParseErrorKind::DuplicateKey,
                format!("duplicate key `{key}`"),
            ));
        }
        target.insert(key, entry);
    }

    if !header_seen {
        return Err(err(1, 1, ParseErrorKind::BadHeader, format!("missing `{HEADER} {FORMAT_VERSION}` header")));
    }

    let mut preamble = Fields::new(preamble, last_line);
    let dim_entry = preamble.require("dimension")?;
    let dim = parse_count(&dim_entry)?;
    if dim == 0 {
        return Err(err(dim_entry.line, dim_entry.value_col, ParseErrorKind::InvalidSet, "dimension must be positive"));
    }
    preamble.finish()?;

    let mut constraint: Option<ConvexSet> = None;
    let mut targets = Vec::new();
    let mut solver = SolverSettings::default();
    let mut solver_seen = false;
    for stanza in stanzas {
        let mut fields = Fields::new(stanza.entries, stanza.line);
        match stanza.name.as_str() {
            "constraint" => {
                if constraint.is_some() {
                    return Err(err(stanza.line, 1, ParseErrorKind::ConstraintCount, "more than one [constraint] section"));
                }
                constraint = Some(parse_set(&mut fields, dim)?);
                fields.finish()?;
            }
            "target" => {
                let set = parse_set(&mut fields, dim)?;
                let weight = match fields.take("weight") {
                    Some(e) => {
                        let w = parse_number(&e.value, e.line, e.value_col)?;
                        if w <= 0.0 {
                            return Err(err(e.line, e.value_col, ParseErrorKind::NonpositiveWeight, format!("nonpositive weight {w}")));
                        }
                        w
                    }
                    None => 1.0,
                };
                fields.finish()?;
                targets.push(TargetTerm { set, weight });
            }
            _ => {
                if solver_seen {
                    return Err(err(stanza.line, 1, ParseErrorKind::DuplicateKey, "more than one [solver] section"));
                }
                solver_seen = true;
                solver = parse_solver(&mut fields, dim)?;
                fields.finish()?;
            }
        }
    }

    let Some(constraint) = constraint else {
        return Err(err(last_line, 1, ParseErrorKind::ConstraintCount, "missing [constraint] section"));
    };
    if targets.is_empty() {
        return Err(err(last_line, 1, ParseErrorKind::NoTargets, "at least one [target] section is required"));
    }
    let problem = HeronProblem::new(constraint, targets)
        .map_err(|e| err(last_line, 1, ParseErrorKind::InvalidSet, e.to_string()))?;
    Ok(ProblemDocument { problem, solver })
}

struct Fields {
    entries: BTreeMap<String, Entry>,
    section_line: usize,
}

impl Fields {
    fn new(entries: BTreeMap<String, Entry>, section_line: usize) -> Self {
        Fields { entries, section_line }
    }

    fn take(&mut self, key: &str) -> Option<Entry> {
        self.entries.remove(key)
    }

    fn require(&mut self, key: &str) -> Result<Entry, ParseError> {
        self.take(key).ok_or_else(|| {
            err(self.section_line, 1, ParseErrorKind::MissingKey, format!("missing key `{key}`"))
        })
    }

    /// Any key left over was not consumed by the section parser.
    fn finish(self) -> Result<(), ParseError> {
        match self.entries.into_iter().min_by_key(|(_, e)| e.line) {
            Some((key, e)) => Err(err(e.line, e.key_col, ParseErrorKind::UnknownKey, format!("unknown key `{key}`"))),
            None => Ok(()),
        }
    }
}

fn parse_number(text: &str, line: usize, column: usize) -> Result<f64, ParseError> {
    match text.trim().parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(err(line, column, ParseErrorKind::MalformedNumber, format!("malformed number `{}`", text.trim()))),
    }
}

fn parse_count(e: &Entry) -> Result<usize, ParseError> {
    e.value
        .parse::<usize>()
        .map_err(|_| err(e.line, e.value_col, ParseErrorKind::MalformedNumber, format!("expected a nonnegative integer, found `{}`", e.value)))
}

fn parse_vector(e: &Entry, dim: usize) -> Result<Vector, ParseError> {
    let mut coords = Vec::new();
    let mut offset = 0;
    for piece in e.value.split(',') {
        let lead = piece.len() - piece.trim_start().len();
        coords.push(parse_number(piece, e.line, e.value_col + offset + lead)?);
        offset += piece.len() + 1;
    }
    if coords.len() != dim {
        return Err(err(
            e.line,
            e.value_col,
            ParseErrorKind::DimensionMismatch,
            format!("expected {dim} coordinates, found {}", coords.len()),
        ));
    }
    Ok(Vector::new(coords).expect("finite, nonempty coordinates"))
}

fn parse_positive(e: &Entry, what: &str) -> Result<f64, ParseError> {
    let v = parse_number(&e.value, e.line, e.value_col)?;
    if v <= 0.0 {
        return Err(err(e.line, e.value_col, ParseErrorKind::NonpositiveRadius, format!("nonpositive {what} {v}")));
    }
    Ok(v)
}

fn parse_set(fields: &mut Fields, dim: usize) -> Result<ConvexSet, ParseError> {
    let kind = fields.require("kind")?;
    let invalid = |e: crate::HeronError| err(kind.line, kind.value_col, ParseErrorKind::InvalidSet, e.to_string());
    let set = match kind.value.as_str() {
        "singleton" => ConvexSet::singleton(parse_vector(&fields.require("point")?, dim)?),
        "ball" | "l1ball" => {
            let center = parse_vector(&fields.require("center")?, dim)?;
            let radius = parse_positive(&fields.require("radius")?, "radius")?;
            if kind.value == "ball" {
                ConvexSet::ball(center, radius).map_err(invalid)?
            } else {
                ConvexSet::l1_ball(center, radius).map_err(invalid)?
            }
        }
        "box" => {
            let lower = parse_vector(&fields.require("lower")?, dim)?;
            let upper_entry = fields.require("upper")?;
            let upper = parse_vector(&upper_entry, dim)?;
            ConvexSet::boxed(lower, upper).map_err(|e| {
                err(upper_entry.line, upper_entry.value_col, ParseErrorKind::InvalidSet, e.to_string())
            })?
        }
        "cube" => {
            let center = parse_vector(&fields.require("center")?, dim)?;
            let side = parse_positive(&fields.require("side")?, "side")?;
            ConvexSet::cube(&center, side).map_err(invalid)?
        }
        "halfspace" | "hyperplane" => {
            let normal_entry = fields.require("normal")?;
            let normal = parse_vector(&normal_entry, dim)?;
            let offset_entry = fields.require("offset")?;
            let offset = parse_number(&offset_entry.value, offset_entry.line, offset_entry.value_col)?;
            let built = if kind.value == "halfspace" {
                ConvexSet::halfspace(normal, offset)
            } else {
                ConvexSet::hyperplane(normal, offset)
            };
            built.map_err(|e| err(normal_entry.line, normal_entry.value_col, ParseErrorKind::InvalidSet, e.to_string()))?
        }
        "simplex" => {
            let scale = parse_positive(&fields.require("scale")?, "scale")?;
            ConvexSet::simplex(dim, scale).map_err(invalid)?
        }
        "whole-space" => ConvexSet::whole_space(dim).map_err(invalid)?,
        other => {
            return Err(err(
                kind.line,
                kind.value_col,
                ParseErrorKind::UnknownSetKind,
                format!("unknown set kind `{other}`"),
            ))
        }
    };
    Ok(set)
}

fn parse_solver(fields: &mut Fields, dim: usize) -> Result<SolverSettings, ParseError> {
    let bad = |e: &Entry, msg: String| err(e.line, e.value_col, ParseErrorKind::InvalidSolverSetting, msg);
    let mut settings = SolverSettings::default();
    if let Some(e) = fields.take("method") {
        settings.method = Some(e.value.parse().map_err(|m| bad(&e, m))?);
    }
    if let Some(e) = fields.take("start") {
        settings.start = Some(parse_vector(&e, dim)?);
    }
    let num = |e: Option<Entry>| -> Result<Option<(f64, Entry)>, ParseError> {
        e.map(|e| parse_number(&e.value, e.line, e.value_col).map(|v| (v, e)))
            .transpose()
    };
    let fixed = num(fields.take("eps"))?;
    let start = num(fields.take("eps-start"))?;
    let decay = num(fields.take("eps-decay"))?;
    let floor = num(fields.take("eps-floor"))?;
    let inner = num(fields.take("inner-tol"))?;
    let schedule = match (fixed, start) {
        (Some((_, e)), Some(_)) => return Err(bad(&e, "`eps` and `eps-start` are mutually exclusive".into())),
        (Some((eps, e)), None) => {
            if let Some((_, d)) = decay.as_ref().or(floor.as_ref()).or(inner.as_ref()) {
                return Err(bad(d, "leg parameters require `eps-start`".into()));
            }
            Some((EpsilonSchedule::Fixed(eps), e))
        }
        (None, Some((s, e))) => Some((build_schedule(s, decay.map(|d| d.0), floor.map(|f| f.0), inner.map(|i| i.0)), e)),
        (None, None) => {
            if let Some((_, d)) = decay.as_ref().or(floor.as_ref()).or(inner.as_ref()) {
                return Err(bad(d, "leg parameters require `eps-start`".into()));
            }
            None
        }
    };
    if let Some((schedule, e)) = schedule {
        schedule.validate().map_err(|m| bad(&e, m.to_string()))?;
        settings.schedule = Some(schedule);
    }
    if let Some(e) = fields.take("max-iter") {
        let n = parse_count(&e)?;
        if n == 0 {
            return Err(bad(&e, "max-iter must be at least 1".into()));
        }
        settings.max_iterations = Some(n);
    }
    if let Some(e) = fields.take("tol") {
        let t = parse_number(&e.value, e.line, e.value_col)?;
        if t <= 0.0 {
            return Err(bad(&e, "tol must be positive".into()));
        }
        settings.tolerance = Some(t);
    }
    if let Some(e) = fields.take("step-scale") {
        let s = parse_number(&e.value, e.line, e.value_col)?;
        if s <= 0.0 {
            return Err(bad(&e, "step-scale must be positive".into()));
        }
        settings.step_scale = Some(s);
    }
    if let Some(e) = fields.take("project-start") {
        settings.project_start = Some(match e.value.as_str() {
            "true" => true,
            "false" => false,
            other => return Err(bad(&e, format!("project-start must be true or false, got `{other}`"))),
        });
    }
    Ok(settings)
}

/// Schedule from leg parameters; a zero start selects the unperturbed map.
pub fn build_schedule(start: f64, decay: Option<f64>, floor: Option<f64>, inner_tol: Option<f64>) -> EpsilonSchedule {
    let EpsilonSchedule::PowerLeg {
        decay: d0,
        floor: f0,
        inner_tol: i0,
        ..
    } = EpsilonSchedule::default()
    else {
        unreachable!("default schedule is power-leg")
    };
    if start == 0.0 {
        return EpsilonSchedule::Fixed(0.0);
    }
    EpsilonSchedule::PowerLeg {
        start,
        decay: decay.unwrap_or(d0),
        floor: floor.unwrap_or(f0).min(start),
        inner_tol: inner_tol.unwrap_or(i0),
    }
}

fn fmt_num(v: f64) -> String {
    format!("{v:?}")
}

fn fmt_vec(v: &Vector) -> String {
    v.iter().map(|c| fmt_num(*c)).collect::<Vec<_>>().join(", ")
}

fn write_set(out: &mut String, set: &ConvexSet) {
    let _ = writeln!(out, "kind = {}", set.kind_name());
    match set {
        ConvexSet::Singleton { point } => {
            let _ = writeln!(out, "point = {}", fmt_vec(point));
        }
        ConvexSet::Ball { center, radius } | ConvexSet::L1Ball { center, radius } => {
            let _ = writeln!(out, "center = {}", fmt_vec(center));
            let _ = writeln!(out, "radius = {}", fmt_num(*radius));
        }
        ConvexSet::Box { lower, upper } => {
            let _ = writeln!(out, "lower = {}", fmt_vec(lower));
            let _ = writeln!(out, "upper = {}", fmt_vec(upper));
        }
        ConvexSet::Halfspace { normal, offset } | ConvexSet::Hyperplane { normal, offset } => {
            let _ = writeln!(out, "normal = {}", fmt_vec(normal));
            let _ = writeln!(out, "offset = {}", fmt_num(*offset));
        }
        ConvexSet::Simplex { scale, .. } => {
            let _ = writeln!(out, "scale = {}", fmt_num(*scale));
        }
        ConvexSet::WholeSpace { .. } => {}
    }
}

/// Canonical text form; parsing it yields the same document.
pub fn serialize_problem(doc: &ProblemDocument) -> String {
    let mut out = String::new();
    let p = &doc.problem;
    let _ = writeln!(out, "{HEADER} {FORMAT_VERSION}");
    let _ = writeln!(out, "dimension = {}", p.dim());
    let _ = writeln!(out, "\n[constraint]");
    write_set(&mut out, p.constraint());
    for t in p.targets() {
        let _ = writeln!(out, "\n[target]");
        write_set(&mut out, &t.set);
        let _ = writeln!(out, "weight = {}", fmt_num(t.weight));
    }
    let s = &doc.solver;
    if !s.is_empty() {
        let _ = writeln!(out, "\n[solver]");
        if let Some(m) = s.method {
            let _ = writeln!(out, "method = {m}");
        }
        if let Some(start) = &s.start {
            let _ = writeln!(out, "start = {}", fmt_vec(start));
        }
        match s.schedule {
            Some(EpsilonSchedule::Fixed(eps)) => {
                let _ = writeln!(out, "eps = {}", fmt_num(eps));
            }
            Some(EpsilonSchedule::PowerLeg {
                start,
                decay,
                floor,
                inner_tol,
            }) => {
                let _ = writeln!(out, "eps-start = {}", fmt_num(start));
                let _ = writeln!(out, "eps-decay = {}", fmt_num(decay));
                let _ = writeln!(out, "eps-floor = {}", fmt_num(floor));
                let _ = writeln!(out, "inner-tol = {}", fmt_num(inner_tol));
            }
            None => {}
        }
        if let Some(n) = s.max_iterations {
            let _ = writeln!(out, "max-iter = {n}");
        }
        if let Some(t) = s.tolerance {
            let _ = writeln!(out, "tol = {}", fmt_num(t));
        }
        if let Some(sc) = s.step_scale {
            let _ = writeln!(out, "step-scale = {}", fmt_num(sc));
        }
        if let Some(b) = s.project_start {
            let _ = writeln!(out, "project-start = {b}");
        }
    }
    out
}
