use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use turnpath_core::construct::{construct_polyline, validate_polyline, vertex_region_check};
use turnpath_core::enumerate::{enumerate_sequences_with, EnumerateOptions};
use turnpath_core::optimize::{convergence_study, solve_discrete_with};
use turnpath_core::region::{psi, region_boundary, Part};
use turnpath_core::{GridSpec, Point, Rect, ValidationReport};

use crate::error::{CliError, CliResult};
use crate::problem::ProblemFile;
use crate::render::{convergence_csv, sequences_csv, Svg};

/// Samples per boundary arc in JSON region exports.
pub const BOUNDARY_SAMPLES: usize = 129;

/// Default cap on enumerated sequences.
pub const DEFAULT_CAP: usize = 20_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Svg,
}

impl std::str::FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "svg" => Ok(Format::Svg),
            other => Err(format!("unknown format {other:?}; expected json, csv or svg")),
        }
    }
}

/// Execution knobs shared by the commands.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunOptions {
    pub workers: Option<usize>,
    pub cap: Option<usize>,
    /// Extra SVG overlay for `construct` and `solve`.
    pub svg: Option<PathBuf>,
}

/// What a command did.
#[derive(Clone, Debug, PartialEq)]
pub struct RunResult {
    pub command: String,
    pub outputs: Vec<PathBuf>,
    pub warnings: Vec<String>,
    pub timing: Duration,
}

fn write(path: &Path, contents: &str, outputs: &mut Vec<PathBuf>) -> CliResult<()> {
    std::fs::write(path, contents).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
    outputs.push(path.to_path_buf());
    Ok(())
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable output");
    s.push('\n');
    s
}

fn enumerate_options(problem: &ProblemFile, run: &RunOptions) -> EnumerateOptions<'static, f64> {
    EnumerateOptions {
        tol: problem.tolerance,
        strict_turns: problem.strict_turns,
        workers: run.workers,
        max_sequences: Some(run.cap.unwrap_or(DEFAULT_CAP)),
        membership: None,
    }
}

fn unsupported(format: Format, command: &str) -> CliError {
    CliError::Validation(format!("{command} does not support the {format:?} format"))
}

fn region_svg(problem: &ProblemFile, extra: &[Point]) -> CliResult<Svg> {
    let region = problem.region()?;
    let mut extent = problem.region_box()?;
    for p in extra {
        extent = Rect {
            min: Point::new(extent.min.x.min(p.x), extent.min.y.min(p.y)),
            max: Point::new(extent.max.x.max(p.x), extent.max.y.max(p.y)),
        };
    }
    let mut svg = Svg::new(extent);
    svg.region(&region);
    svg.chord(problem.a, problem.b);
    Ok(svg)
}

fn finish_svg(mut svg: Svg, problem: &ProblemFile) -> String {
    svg.marker(problem.a, "A");
    svg.marker(problem.b, "B");
    svg.finish()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionOutput {
    #[serde(rename = "A")]
    pub a: Point,
    #[serde(rename = "B")]
    pub b: Point,
    pub n: usize,
    pub phi: f64,
    /// `n * phi`, the angle of the exported region.
    pub span: f64,
    pub right: Vec<Point>,
    pub left: Vec<Point>,
    pub bounding_box: Rect,
}

/// Exports the boundary of `S(A, B, n phi)`.
pub fn cmd_region(problem: &ProblemFile, out: &Path, format: Format) -> CliResult<RunResult> {
    let start = Instant::now();
    let mut outputs = Vec::new();
    match format {
        Format::Json => {
            let region = problem.region()?;
            let value = RegionOutput {
                a: problem.a,
                b: problem.b,
                n: problem.n,
                phi: problem.phi,
                span: problem.span(),
                right: region_boundary(&region, Part::Right, BOUNDARY_SAMPLES)?,
                left: region_boundary(&region, Part::Left, BOUNDARY_SAMPLES)?,
                bounding_box: problem.region_box()?,
            };
            write(out, &to_json(&value), &mut outputs)?;
        }
        Format::Svg => write(out, &finish_svg(region_svg(problem, &[])?, problem), &mut outputs)?,
        Format::Csv => return Err(unsupported(format, "region")),
    }
    Ok(RunResult {
        command: "region".into(),
        outputs,
        warnings: Vec::new(),
        timing: start.elapsed(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstructOutput {
    #[serde(rename = "A")]
    pub a: Point,
    #[serde(rename = "B")]
    pub b: Point,
    pub n: usize,
    pub phi: f64,
    pub b1: Point,
    pub vertices: Vec<Point>,
    pub report: ValidationReport,
    pub vertex_region_check: bool,
}

fn membership_diagnostic(problem: &ProblemFile, b1: Point) -> String {
    if b1 == problem.a || b1 == problem.b {
        return "B1 coincides with A or B".into();
    }
    let frame = match problem.region() {
        Ok(r) => r.frame(),
        Err(e) => return e.to_string(),
    };
    let (bound, kind) = if problem.n == 1 {
        (problem.phi, "cl S(A, B, phi)")
    } else {
        (problem.span(), "S(A, B, n phi)")
    };
    match psi(frame.to_canonical(b1)) {
        Ok(angle) => format!(
            "B1 = ({}, {}) is not in {kind}: |angle(B - B1, B1 - A)| = {} vs bound {}",
            b1.x,
            b1.y,
            angle.abs(),
            bound
        ),
        Err(e) => e.to_string(),
    }
}

/// Builds the closed-form polyline through `b1` and validates it.
pub fn cmd_construct(problem: &ProblemFile, b1: Point, out: &Path, run: &RunOptions) -> CliResult<RunResult> {
    let start = Instant::now();
    let path = construct_polyline(problem.a, problem.b, problem.n, problem.phi, b1, problem.tolerance).map_err(
        |e| match e {
            turnpath_core::Error::InfeasibleStart(_) => CliError::Validation(membership_diagnostic(problem, b1)),
            other => other.into(),
        },
    )?;
    let report = validate_polyline(&path, problem.phi, problem.tolerance);
    let value = ConstructOutput {
        a: problem.a,
        b: problem.b,
        n: problem.n,
        phi: problem.phi,
        b1,
        vertex_region_check: vertex_region_check(&path, problem.phi, problem.tolerance),
        vertices: path.vertices.clone(),
        report,
    };
    let mut outputs = Vec::new();
    write(out, &to_json(&value), &mut outputs)?;
    if let Some(svg_path) = &run.svg {
        let mut svg = region_svg(problem, &path.vertices)?;
        svg.polyline(&path.vertices);
        write(svg_path, &finish_svg(svg, problem), &mut outputs)?;
    }
    let mut warnings = Vec::new();
    if !value.report.ok {
        warnings.push("constructed polyline failed validation".into());
    }
    Ok(RunResult {
        command: "construct".into(),
        outputs,
        warnings,
        timing: start.elapsed(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnumerateOutput {
    #[serde(rename = "A")]
    pub a: Point,
    #[serde(rename = "B")]
    pub b: Point,
    pub n: usize,
    pub phi: f64,
    pub grid: GridSpec,
    pub count: usize,
    pub sequences: Vec<Vec<Point>>,
}

/// Writes the full admissible lattice set.
pub fn cmd_enumerate(problem: &ProblemFile, out: &Path, format: Format, run: &RunOptions) -> CliResult<RunResult> {
    let start = Instant::now();
    if format == Format::Svg {
        return Err(unsupported(format, "enumerate"));
    }
    let grid = problem.grid_or_default(None)?;
    let warnings = problem.grid_warnings(&grid)?;
    let set = enumerate_sequences_with(
        problem.a,
        problem.b,
        problem.n,
        problem.phi,
        &grid,
        &enumerate_options(problem, run),
    )?;
    let contents = match format {
        Format::Csv => sequences_csv(&set),
        _ => to_json(&EnumerateOutput {
            a: problem.a,
            b: problem.b,
            n: problem.n,
            phi: problem.phi,
            grid,
            count: set.len(),
            sequences: set.iter().map(|s| s.to_vec()).collect(),
        }),
    };
    let mut outputs = Vec::new();
    write(out, &contents, &mut outputs)?;
    Ok(RunResult {
        command: "enumerate".into(),
        outputs,
        warnings,
        timing: start.elapsed(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveOutput {
    #[serde(rename = "A")]
    pub a: Point,
    #[serde(rename = "B")]
    pub b: Point,
    pub n: usize,
    pub phi: f64,
    pub grid: GridSpec,
    pub sequence: Vec<Point>,
    pub objective: f64,
    pub turn_angles: Vec<f64>,
    pub candidates_examined: u64,
}

/// Minimizes the problem's cost over the lattice set.
pub fn cmd_solve(problem: &ProblemFile, out: &Path, run: &RunOptions) -> CliResult<RunResult> {
    let start = Instant::now();
    let grid = problem.grid_or_default(None)?;
    let warnings = problem.grid_warnings(&grid)?;
    let cost = problem.cost_model();
    let solution = solve_discrete_with(
        problem.a,
        problem.b,
        problem.n,
        problem.phi,
        &grid,
        &cost,
        &enumerate_options(problem, run),
    )?
    .ok_or_else(|| CliError::NoSolution(format!("no admissible sequence on the grid with tau = {}", grid.tau)))?;
    let seq = solution.sequence.points;
    let path = turnpath_core::Polyline::from_interior(problem.a, &seq, problem.b);
    let value = SolveOutput {
        a: problem.a,
        b: problem.b,
        n: problem.n,
        phi: problem.phi,
        grid,
        turn_angles: path.turn_angles()?,
        sequence: seq,
        objective: solution.objective,
        candidates_examined: solution.stats.candidates_examined,
    };
    let mut outputs = Vec::new();
    write(out, &to_json(&value), &mut outputs)?;
    if let Some(svg_path) = &run.svg {
        let mut svg = region_svg(problem, &path.vertices)?;
        svg.polyline(&path.vertices);
        write(svg_path, &finish_svg(svg, problem), &mut outputs)?;
    }
    Ok(RunResult {
        command: "solve".into(),
        outputs,
        warnings,
        timing: start.elapsed(),
    })
}

/// Runs the nested sweep `tau0, tau0/2, ...` over `levels` grids.
pub fn cmd_converge(
    problem: &ProblemFile,
    tau0: f64,
    levels: usize,
    out: &Path,
    format: Format,
    run: &RunOptions,
) -> CliResult<RunResult> {
    let start = Instant::now();
    if levels < 2 {
        return Err(CliError::Validation(format!(
            "--levels must be at least 2, got {levels}"
        )));
    }
    if !(tau0 > 0.0 && tau0.is_finite()) {
        return Err(CliError::Validation(format!("--tau0 must be positive, got {tau0}")));
    }
    let grid = problem.grid_or_default(Some(tau0))?;
    let warnings = problem.grid_warnings(&grid)?;
    let taus: Vec<f64> = (0..levels).map(|k| tau0 / (1u64 << k) as f64).collect();
    let report = convergence_study(
        problem.a,
        problem.b,
        problem.n,
        problem.phi,
        &problem.cost_model(),
        &grid,
        &taus,
        &enumerate_options(problem, run),
    )?;
    let contents = match format {
        Format::Csv => convergence_csv(&report),
        Format::Json => to_json(&report),
        Format::Svg => return Err(unsupported(format, "converge")),
    };
    let mut outputs = Vec::new();
    write(out, &contents, &mut outputs)?;
    if !report.any_solved() {
        return Err(CliError::NoSolution("every level of the sweep is empty".into()));
    }
    Ok(RunResult {
        command: "converge".into(),
        outputs,
        warnings,
        timing: start.elapsed(),
    })
}
