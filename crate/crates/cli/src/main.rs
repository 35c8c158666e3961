use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use turnpath::{
    cmd_construct, cmd_converge, cmd_enumerate, cmd_region, cmd_solve, CliError, Format, ProblemFile, RunOptions,
};
use turnpath_core::Point;

#[derive(Parser)]
#[command(
    name = "turnpath",
    version,
    about = "Plan polylines from A to B with at most n turns bounded by phi"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Export the boundary of S(A, B, n phi) (svg or json).
    Region(Args),
    /// Build and validate the polyline through --b1 (json, --svg overlay).
    Construct(Args),
    /// Write every admissible lattice sequence (json or csv).
    Enumerate(Args),
    /// Minimize the path cost over the lattice (json, --svg overlay).
    Solve(Args),
    /// Nested-grid sweep tau0, tau0/2, ... (csv or json).
    Converge(Args),
}

#[derive(clap::Args)]
struct Args {
    /// Problem file (JSON).
    #[arg(long)]
    input: PathBuf,
    /// Output path.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_parser = parse_format)]
    format: Option<Format>,
    /// First turn point as X,Y.
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    b1: Option<Point>,
    #[arg(long)]
    tau0: Option<f64>,
    #[arg(long)]
    levels: Option<usize>,
    /// Overrides the seed recorded in the problem file.
    #[arg(long)]
    seed: Option<u64>,
    /// Read phi in degrees.
    #[arg(long)]
    degrees: bool,
    /// Worker threads (output does not depend on it).
    #[arg(long)]
    workers: Option<usize>,
    /// Additional SVG overlay for construct and solve.
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Maximum number of enumerated sequences.
    #[arg(long)]
    cap: Option<usize>,
}

fn parse_format(s: &str) -> Result<Format, String> {
    s.parse()
}

fn parse_point(s: &str) -> Result<Point, String> {
    let (x, y) = s.split_once(',').ok_or_else(|| format!("expected X,Y, got {s:?}"))?;
    let parse = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("{v:?}: {e}"));
    Ok(Point::new(parse(x)?, parse(y)?))
}

fn run(command: Command) -> Result<turnpath::RunResult, CliError> {
    let (name, args) = match command {
        Command::Region(a) => ("region", a),
        Command::Construct(a) => ("construct", a),
        Command::Enumerate(a) => ("enumerate", a),
        Command::Solve(a) => ("solve", a),
        Command::Converge(a) => ("converge", a),
    };
    let mut problem = ProblemFile::load(&args.input, args.degrees)?;
    if let Some(seed) = args.seed {
        problem.seed = seed;
    }
    let opts = RunOptions {
        workers: args.workers,
        cap: args.cap,
        svg: args.svg,
    };
    let missing = |flag: &str| CliError::Validation(format!("{name} requires {flag}"));
    match name {
        "region" => cmd_region(&problem, &args.out, args.format.unwrap_or(Format::Svg)),
        "construct" => {
            if args.format.is_some_and(|f| f != Format::Json) {
                return Err(CliError::Validation(
                    "construct writes json; use --svg for an overlay".into(),
                ));
            }
            cmd_construct(&problem, args.b1.ok_or_else(|| missing("--b1 X,Y"))?, &args.out, &opts)
        }
        "enumerate" => cmd_enumerate(&problem, &args.out, args.format.unwrap_or(Format::Json), &opts),
        "solve" => {
            if args.format.is_some_and(|f| f != Format::Json) {
                return Err(CliError::Validation(
                    "solve writes json; use --svg for an overlay".into(),
                ));
            }
            cmd_solve(&problem, &args.out, &opts)
        }
        _ => {
            let tau0 = match (args.tau0, &problem.grid) {
                (Some(t), _) => t,
                (None, Some(g)) => g.tau,
                (None, None) => return Err(missing("--tau0 (or a grid in the problem file)")),
            };
            let levels = args.levels.ok_or_else(|| missing("--levels"))?;
            cmd_converge(
                &problem,
                tau0,
                levels,
                &args.out,
                args.format.unwrap_or(Format::Csv),
                &opts,
            )
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli.command) {
        Ok(result) => {
            for w in &result.warnings {
                eprintln!("warning: {w}");
            }
            let paths: Vec<String> = result.outputs.iter().map(|p| p.display().to_string()).collect();
            eprintln!(
                "turnpath {}: wrote {} in {:.3} s",
                result.command,
                paths.join(", "),
                result.timing.as_secs_f64()
            );
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
