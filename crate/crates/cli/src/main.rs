//! Command-line front end for the anisotropic XY chain toolkit.
//!
//! Four subcommands cover the workflow: `sweep` tabulates observables over a
//! coupling grid, `fit` runs the finite-size scaling analysis, `oracle-check`
//! cross-validates the dense diagonalization against the fermionic solver,
//! and `range` reports how far the pairwise entanglement reaches.
//!
//! Every command reads an optional `key = value` config file, lets flags
//! override it, echoes the effective configuration into the output header,
//! and writes files atomically so failed runs never leave partial data.

mod commands;
mod config;
mod input;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

/// Failures split by exit code: malformed flags or config files are bad
/// invocations (exit 2); everything that parses but fails validation or
/// computation exits 1.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Invocation(String),
    #[error("{0}")]
    Failure(String),
}

#[derive(Parser)]
#[command(
    name = "xychain",
    version,
    about = "Exact pairwise entanglement in the anisotropic XY chain in a transverse field"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate magnetization, correlators, concurrences, and derivative
    /// columns over a coupling grid, one row per (N, lambda)
    Sweep(SweepArgs),
    /// Recompute scaling curves and fit the shift, depth, and collapse laws;
    /// positional sweep files serve as the coverage manifest
    Fit(FitArgs),
    /// Compare dense diagonalization against the fermionic solver on the
    /// small-ring grid and report per-quantity deviations
    OracleCheck(OracleCheckArgs),
    /// Entanglement range and total concurrence per anisotropy
    Range(RangeArgs),
}

/// Flags shared by every subcommand.
#[derive(Args)]
struct CommonArgs {
    /// Config file: one `key = value` per line, `#` starts a comment
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output path (stdout when omitted and no `output_path` key is set)
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Output format: csv or json
    #[arg(long, value_name = "FMT")]
    format: Option<String>,
    /// Worker threads for grid computations (default: all cores)
    #[arg(long, value_name = "K")]
    threads: Option<String>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Anisotropy gamma in (0, 1]
    #[arg(long, value_name = "G")]
    gamma: Option<String>,
    /// Comma list of odd ring sizes, `inf` for the infinite chain
    #[arg(long, value_name = "LIST")]
    sizes: Option<String>,
    /// Lower edge of the coupling grid
    #[arg(long, value_name = "X")]
    lambda_min: Option<String>,
    /// Upper edge of the coupling grid
    #[arg(long, value_name = "X")]
    lambda_max: Option<String>,
    /// Number of grid points
    #[arg(long, value_name = "P")]
    grid_points: Option<String>,
    /// Grid layout: linear or geometric-about-critical
    #[arg(long, value_name = "KIND")]
    grid_kind: Option<String>,
    /// Largest correlator separation tabulated
    #[arg(long, value_name = "R")]
    r_max: Option<String>,
    /// Finite-difference step for the derivative columns
    #[arg(long, value_name = "H")]
    step: Option<String>,
}

#[derive(Args)]
struct FitArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Anisotropy gamma in (0, 1]
    #[arg(long, value_name = "G")]
    gamma: Option<String>,
    /// Comma list of odd ring sizes entering the fits
    #[arg(long, value_name = "LIST")]
    sizes: Option<String>,
    /// Reference coupling anchoring the collapse curves
    #[arg(long, value_name = "X")]
    lambda_0: Option<String>,
    /// Sweep output files establishing coverage of the requested sizes
    #[arg(value_name = "SWEEP_FILE", required = true)]
    inputs: Vec<PathBuf>,
}

#[derive(Args)]
struct OracleCheckArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Comma list of odd ring sizes (3 to 13)
    #[arg(long, value_name = "LIST")]
    sizes: Option<String>,
    /// Comma list of anisotropies to check
    #[arg(long, value_name = "LIST")]
    gamma: Option<String>,
    /// Test hook: flip the heavy bond axis in the dense Hamiltonian; the
    /// check must then fail on an x/y correlator
    #[arg(long)]
    perturb_convention: bool,
}

#[derive(Args)]
struct RangeArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Comma list of anisotropies (required)
    #[arg(long, value_name = "LIST")]
    gamma: Option<String>,
    /// Concurrence level below which a separation counts as dead
    #[arg(long, value_name = "T")]
    threshold: Option<String>,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Invocation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Sweep(args) => commands::sweep::run(args),
        Command::Fit(args) => commands::fit::run(args),
        Command::OracleCheck(args) => commands::oracle_check::run(args),
        Command::Range(args) => commands::range::run(args),
    }
}
