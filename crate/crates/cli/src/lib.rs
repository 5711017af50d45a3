//! `erws` command-line front end: exact curves, simulations, regime scans,
//! oracle checks and exponent fits.

pub mod args;
mod commands;
pub mod output;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use args::{parse_checkpoints, parse_count, parse_range, parse_seed, parse_window, CheckpointSpec, Range, Seed};
pub use commands::{cmd_exact, cmd_fit, cmd_oracle, cmd_scan, cmd_simulate, ORACLE_TOLERANCE};

pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_FALLBACK: i32 = 3;
pub const EXIT_MISMATCH: i32 = 4;

#[derive(Debug)]
pub enum Failure {
    /// Bad flags or inadmissible parameters.
    Usage(String),
    /// Numerical fallback used while `--strict` was set.
    Fallback(String),
    /// Oracle paths disagree.
    Mismatch(String),
    Runtime(anyhow::Error),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Fallback(_) => EXIT_FALLBACK,
            Failure::Mismatch(_) => EXIT_MISMATCH,
            Failure::Runtime(_) => EXIT_RUNTIME,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "usage error: {m}"),
            Failure::Fallback(m) => write!(f, "numerical fallback: {m}"),
            Failure::Mismatch(m) => write!(f, "oracle mismatch: {m}"),
            Failure::Runtime(e) => write!(f, "error: {e:#}"),
        }
    }
}

macro_rules! runtime_from {
    ($($t:ty),*) => {
        $(impl From<$t> for Failure {
            fn from(e: $t) -> Self {
                Failure::Runtime(e.into())
            }
        })*
    };
}

runtime_from!(
    anyhow::Error,
    std::io::Error,
    csv::Error,
    serde_json::Error,
    erws_core::sim::SimError,
    erws_core::exact::ExactError,
    erws_core::oracle::OracleError,
    erws_core::fit::FitError
);

pub(crate) fn usage(msg: impl std::fmt::Display) -> Failure {
    Failure::Usage(msg.to_string())
}

#[derive(Debug, Parser)]
#[command(name = "erws", version, about = "Elephant random walk with stops: exact moments and simulation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form moments at a set of times.
    Exact(ExactArgs),
    /// Monte Carlo ensemble in 1D or 2D.
    Simulate(SimulateArgs),
    /// Regime classification over an (r, gamma) grid.
    Scan(ScanArgs),
    /// Exhaustive enumeration against closed form and recurrence.
    Oracle(OracleArgs),
    /// Power-law fit of a moment curve read from CSV.
    Fit(FitArgs),
}

#[derive(Debug, Clone, Args)]
pub struct WalkArgs {
    #[arg(long)]
    pub eps: f64,
    #[arg(long)]
    pub r: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub gamma: f64,
}

#[derive(Debug, Clone, Args)]
pub struct ExactArgs {
    #[command(flatten)]
    pub walk: WalkArgs,
    #[arg(long, default_value_t = 0.5)]
    pub s: f64,
    #[arg(long, value_parser = parse_count)]
    pub t_max: Option<u64>,
    /// `log`, `linear` or a comma-separated list of times.
    #[arg(long, value_parser = parse_checkpoints, default_value = "log")]
    pub checkpoints: CheckpointSpec,
    /// Number of times for `linear` checkpoints.
    #[arg(long, default_value_t = 100)]
    pub points: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Exit with code 3 if any value came from the recurrence fallback.
    #[arg(long)]
    pub strict: bool,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub walk: WalkArgs,
    #[arg(long, default_value_t = 1)]
    pub dim: u8,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub gamma_prime: f64,
    /// Share of `1 - r` given to the (p, q) pair in 2D.
    #[arg(long, default_value_t = 0.5)]
    pub axis_share: f64,
    #[arg(long, default_value_t = 0.5)]
    pub s: f64,
    #[arg(long)]
    pub s1: Option<f64>,
    #[arg(long)]
    pub s2: Option<f64>,
    #[arg(long)]
    pub s3: Option<f64>,
    #[arg(long)]
    pub s4: Option<f64>,
    #[arg(long, value_parser = parse_count)]
    pub walkers: u64,
    #[arg(long, value_parser = parse_count)]
    pub t_max: u64,
    #[arg(long, value_parser = parse_checkpoints, default_value = "log")]
    pub checkpoints: CheckpointSpec,
    #[arg(long, default_value_t = 100)]
    pub points: usize,
    /// Master seed, or `random`.
    #[arg(long, value_parser = parse_seed, default_value_t = Seed::Fixed(args::DEFAULT_SEED))]
    pub seed: Seed,
    #[arg(long)]
    pub threads: Option<usize>,
    /// Upper bound on accumulator memory in bytes.
    #[arg(long, value_parser = parse_count)]
    pub memory_cap: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl std::fmt::Display for Seed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Seed::Fixed(v) => write!(f, "{v}"),
            Seed::Random => f.write_str("random"),
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct ScanArgs {
    #[arg(long)]
    pub eps: f64,
    #[arg(long, value_parser = parse_range)]
    pub r_range: Range,
    #[arg(long, value_parser = parse_range, required_unless_present = "path", allow_hyphen_values = true)]
    pub gamma_range: Option<Range>,
    /// Classify the unperturbed walk (eps = 0) instead.
    #[arg(long)]
    pub baseline: bool,
    /// Follow `regular`, `residual` or `super` gamma(eps, r) instead of a gamma grid.
    #[arg(long, conflicts_with = "gamma_range")]
    pub path: Option<erws_core::exact::Path>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub walk: WalkArgs,
    #[arg(long, default_value_t = 1)]
    pub dim: u8,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub gamma_prime: f64,
    #[arg(long, default_value_t = 0.5)]
    pub axis_share: f64,
    #[arg(long, default_value_t = 0.5)]
    pub s: f64,
    #[arg(long)]
    pub t: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct FitArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_parser = parse_window)]
    pub window: (u64, u64),
    /// Column to fit; defaults to `msd`, else `m2`.
    #[arg(long)]
    pub column: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Exact(a) => cmd_exact(&a),
        Command::Simulate(a) => cmd_simulate(&a),
        Command::Scan(a) => cmd_scan(&a),
        Command::Oracle(a) => cmd_oracle(&a),
        Command::Fit(a) => cmd_fit(&a),
    }
}
