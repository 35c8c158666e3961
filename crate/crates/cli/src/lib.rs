//! Command-line front end: read a problem file, run one of the `region`,
//! `construct`, `enumerate`, `solve` or `converge` commands, and write
//! JSON, CSV or SVG.
//!
//! Exit codes: 0 success, 1 validation, 2 I/O, 3 resource cap, 4 no solution.

pub mod commands;
pub mod error;
pub mod problem;
pub mod render;

pub use commands::{cmd_construct, cmd_converge, cmd_enumerate, cmd_region, cmd_solve, Format, RunOptions, RunResult};
pub use error::{CliError, CliResult};
pub use problem::{CostSpec, ProblemFile};
