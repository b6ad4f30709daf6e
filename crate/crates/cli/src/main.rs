//! `postsel`: feasibility reports, exact analytics, Monte Carlo runs,
//! parameter sweeps and trajectory tables for the postselected repulsion
//! protocol.
//!
//! Exit status: 0 on success, 1 for physics or validation violations, 2 for
//! usage and parse errors.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "postsel", version, about = "Postselected weak-value repulsion: analytics and simulation")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Built-in parameter set (paper-A or paper-B).
    #[arg(long, global = true, conflicts_with = "params")]
    pub preset: Option<String>,
    /// JSON parameter file; an earlier output document is accepted too.
    #[arg(long, global = true)]
    pub params: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Write the document here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Feasibility chain for a parameter set.
    Feasibility(FeasibilityArgs),
    /// Exact and leading-order analytics at given (epsilon, r).
    #[command(allow_negative_numbers = true)]
    Exact(ExactArgs),
    /// Monte Carlo run of the quantum model or the classical baseline.
    #[command(allow_negative_numbers = true)]
    Simulate(SimulateArgs),
    /// Derived quantities over a grid of one parameter.
    #[command(allow_negative_numbers = true)]
    Sweep(SweepArgs),
    /// Separation history and time-dependent impulse.
    #[command(allow_negative_numbers = true)]
    Trajectory(TrajectoryArgs),
}

#[derive(Args, Debug)]
pub struct FeasibilityArgs {
    /// Successful discriminations required for a detection claim.
    #[arg(long, default_value_t = 10)]
    pub target: u64,
}

#[derive(Args, Debug)]
pub struct ExactArgs {
    #[arg(long)]
    pub eps: Option<f64>,
    /// Kick in momentum widths.
    #[arg(long)]
    pub r: Option<f64>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModelArg {
    Quantum,
    Classical,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModeArg {
    Full,
    Conditioned,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[arg(long, value_enum, default_value_t = ModelArg::Quantum)]
    pub model: ModelArg,
    #[arg(long, value_enum, default_value_t = ModeArg::Full)]
    pub mode: ModeArg,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub r: Option<f64>,
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
    /// Refuse to run without an explicit --seed.
    #[arg(long)]
    pub strict: bool,
    /// Per-trial CSV (trial,postselected,momentum,position_m).
    #[arg(long)]
    pub samples_csv: Option<PathBuf>,
    /// Classical baseline: acceptance probability of the far arm.
    #[arg(long, default_value_t = 1.0)]
    pub accept_l: f64,
    /// Classical baseline: acceptance probability of the near arm.
    #[arg(long, default_value_t = 1.0)]
    pub accept_r: f64,
    /// Instead of a fixed run, sample until the one-sided z-test reaches this value.
    #[arg(long)]
    pub until_z: Option<f64>,
    /// Bernoulli-trial budget for --until-z.
    #[arg(long, default_value_t = 10_000_000_000)]
    pub budget: u64,
    /// Independent --until-z runs; the median trial count is reported.
    #[arg(long, default_value_t = 1)]
    pub replicates: u64,
    /// Postselected samples between significance checks for --until-z.
    #[arg(long, default_value_t = 128)]
    pub check_every: u64,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    /// Field of the parameter set to vary.
    #[arg(long)]
    pub param: String,
    #[arg(long)]
    pub from: f64,
    #[arg(long)]
    pub to: f64,
    #[arg(long, default_value_t = 11)]
    pub points: usize,
    /// Logarithmic spacing.
    #[arg(long)]
    pub log: bool,
    #[arg(long, default_value_t = 10)]
    pub target: u64,
}

#[derive(Args, Debug)]
pub struct TrajectoryArgs {
    /// Interferometer time, s (default: from the parameter set).
    #[arg(long)]
    pub tau: Option<f64>,
    /// Maximal separation, m (default: from the parameter set).
    #[arg(long)]
    pub delta_x: Option<f64>,
    #[arg(long, default_value_t = 101)]
    pub samples: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Feasibility(a) => commands::feasibility(&cli.global, a),
        Command::Exact(a) => commands::exact(&cli.global, a),
        Command::Simulate(a) => commands::simulate(&cli.global, a),
        Command::Sweep(a) => commands::sweep(&cli.global, a),
        Command::Trajectory(a) => commands::trajectory(&cli.global, a),
    };
    match result.and_then(|doc| commands::emit(&cli.global, &doc)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
