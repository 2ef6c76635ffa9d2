//! Command-line surface of the floodsim workspace.
//!
//! Five subcommands: `simulate` (deterministic run), `ensemble` (Monte
//! Carlo bands and precision trace), `dse` (grid evaluation, trade-off
//! CSV, Pareto recipe), `managed` (scenario-driven batch loop), and
//! `overhead` (managed-vs-native wall-clock ratio).
//!
//! Exit codes: 0 success, 1 usage error, 2 input parse error, 3
//! infeasible or runtime error. Randomized commands take `--seed` and are
//! reproducible; outputs are byte-identical for any `--workers`.

pub mod commands;
pub mod config;
pub mod io;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

/// CLI failure, carrying its process exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Parse(_) => 2,
            CliError::Runtime(_) => 3,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "floodsim",
    version,
    about = "Flood-prediction Monte Carlo workload under a runtime resource manager on a simulated many-core node"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Deterministic rainfall-runoff run, optionally scored against observations
    Simulate(SimulateArgs),
    /// Monte Carlo quantile bands, with an optional precision trace
    Ensemble(EnsembleArgs),
    /// Design-space exploration: trade-off CSV and Pareto recipe XML
    Dse(DseArgs),
    /// Scenario-driven managed batch loop writing a batch log CSV
    Managed(ManagedArgs),
    /// Wall-clock overhead of managed execution over the bare pipeline
    Overhead(OverheadArgs),
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Rainfall CSV (timestamp,precip_mm)
    #[arg(long)]
    pub rainfall: PathBuf,
    /// Catchment config file (key = value)
    #[arg(long)]
    pub catchment: PathBuf,
    /// Observed discharge CSV (timestamp,discharge_m3s) for Nash-Sutcliffe scoring
    #[arg(long)]
    pub observed: Option<PathBuf>,
    /// Output hydrograph CSV
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EnsembleArgs {
    /// Rainfall CSV (timestamp,precip_mm)
    #[arg(long)]
    pub rainfall: PathBuf,
    /// Catchment config file (key = value)
    #[arg(long)]
    pub catchment: PathBuf,
    /// Sampling config file (key = value)
    #[arg(long)]
    pub sampling: PathBuf,
    /// Monte Carlo iterations
    #[arg(long, default_value_t = 1000)]
    pub iterations: usize,
    /// Seed of the counter-based generator
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Ensemble worker threads (the output does not depend on this)
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    /// Comma-separated quantiles for the bands
    #[arg(long, default_value = "0.05,0.5,0.95")]
    pub quantiles: String,
    /// Output bands CSV
    #[arg(long)]
    pub out: PathBuf,
    /// Optional precision-trace CSV (decade checkpoints up to --iterations)
    #[arg(long = "trace-out")]
    pub trace_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DseArgs {
    /// Rainfall CSV (timestamp,precip_mm)
    #[arg(long)]
    pub rainfall: PathBuf,
    /// Catchment config file (key = value)
    #[arg(long)]
    pub catchment: PathBuf,
    /// Sampling config file (key = value)
    #[arg(long)]
    pub sampling: PathBuf,
    /// Platform config file (key = value)
    #[arg(long)]
    pub platform: PathBuf,
    /// Workload profile config file (key = value)
    #[arg(long)]
    pub profile: PathBuf,
    /// Comma-separated Monte Carlo iteration levels
    #[arg(long = "iteration-levels", default_value = "100,1000,10000")]
    pub iteration_levels: String,
    /// Comma-separated core counts (default: six even steps up to the managed cores)
    #[arg(long)]
    pub cores: Option<String>,
    /// Comma-separated frequencies in MHz (default: every platform level)
    #[arg(long)]
    pub freqs: Option<String>,
    /// Seed shared by all configurations
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Ensemble worker threads (the output does not depend on this)
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    /// Output trade-off CSV
    #[arg(long)]
    pub out: PathBuf,
    /// Output recipe XML for the Pareto front
    #[arg(long = "recipe-out")]
    pub recipe_out: Option<PathBuf>,
    /// Priority attribute of the emitted recipe
    #[arg(long, default_value_t = 0)]
    pub priority: u32,
}

#[derive(Debug, Args)]
pub struct ManagedArgs {
    /// Rainfall CSV; consumed one equal window per batch
    #[arg(long)]
    pub rainfall: PathBuf,
    /// Catchment config file (key = value)
    #[arg(long)]
    pub catchment: PathBuf,
    /// Sampling config file (key = value)
    #[arg(long)]
    pub sampling: PathBuf,
    /// Platform config file (key = value)
    #[arg(long)]
    pub platform: PathBuf,
    /// Workload profile config file (key = value)
    #[arg(long)]
    pub profile: PathBuf,
    /// Thresholds config file (key = value)
    #[arg(long)]
    pub thresholds: PathBuf,
    /// Recipe XML with the schedulable AWMs
    #[arg(long)]
    pub recipe: PathBuf,
    /// Batch period in seconds (the QoS deadline)
    #[arg(long = "batch-period")]
    pub batch_period: f64,
    /// Number of batches to run
    #[arg(long, default_value_t = 1)]
    pub batches: usize,
    /// Seed; batch b uses seed + b
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Cap on ensemble worker threads (the log does not depend on this)
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    /// Output batch-log CSV
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct OverheadArgs {
    /// Rainfall CSV (timestamp,precip_mm)
    #[arg(long)]
    pub rainfall: PathBuf,
    /// Catchment config file (key = value)
    #[arg(long)]
    pub catchment: PathBuf,
    /// Sampling config file (key = value)
    #[arg(long)]
    pub sampling: PathBuf,
    /// Platform config file (key = value)
    #[arg(long)]
    pub platform: PathBuf,
    /// Workload profile config file (key = value)
    #[arg(long)]
    pub profile: PathBuf,
    /// Monte Carlo iterations per batch
    #[arg(long, default_value_t = 1000)]
    pub iterations: u32,
    /// Cores of the measured AWM (default: all managed cores)
    #[arg(long)]
    pub cores: Option<u32>,
    /// Frequency of the measured AWM in MHz (default: the reference level)
    #[arg(long)]
    pub freq: Option<u32>,
    /// Timing repetitions (medians are compared)
    #[arg(long, default_value_t = 5)]
    pub reps: usize,
    /// Seed shared by the managed and bare runs
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Ensemble worker threads
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
}

/// Parse `argv` and run the selected command, returning the process exit
/// code instead of exiting, so tests can drive the full CLI in-process.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return 0;
        }
        Err(e) => {
            eprint!("{e}");
            return 1;
        }
    };
    let result = match &cli.command {
        Command::Simulate(args) => commands::simulate(args),
        Command::Ensemble(args) => commands::ensemble(args),
        Command::Dse(args) => commands::dse(args),
        Command::Managed(args) => commands::managed(args),
        Command::Overhead(args) => commands::overhead(args),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
