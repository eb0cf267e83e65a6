//! `disckit`: discrepancy estimation, source ranking and experiment reproduction.
//!
//! Exit codes: 0 success, 1 usage, 2 data or parse failure, 3 numeric failure.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use output::Format;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(String),
    Numeric(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Data(m) => write!(f, "data error: {m}"),
            CliError::Numeric(m) => write!(f, "numeric failure: {m}"),
        }
    }
}

impl From<disckit::Error> for CliError {
    fn from(e: disckit::Error) -> Self {
        use disckit::Error as E;
        if e.is_numeric() {
            return CliError::Numeric(e.to_string());
        }
        match e {
            E::InvalidParameter(_) | E::GridTooLarge { .. } | E::MissingGrid => {
                CliError::Usage(e.to_string())
            }
            _ => CliError::Data(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "disckit",
    version,
    about = "Source-guided discrepancy, d_H and X-disc oracles"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Three 2-D Gaussian domains: S-disc, d_H and target loss for both sources.
    Toy(ToyArgs),
    /// S-disc and d_H against sample size for an identical and a biased source.
    Convergence(ConvergenceArgs),
    /// Rank sources by ascending discrepancy to a target.
    Rank(RankArgs),
    /// Time the estimators and the X-disc pair enumeration.
    Bench(BenchArgs),
    /// One estimate between a source and a target file, printed as JSON.
    Estimate(EstimateArgs),
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Run seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format: json or csv.
    #[arg(long)]
    format: Option<Format>,
    /// Flat `key = value` file; flags take precedence over it.
    #[arg(long)]
    config: Option<PathBuf>,
}

/// Training and grid knobs shared by every estimator.
#[derive(Debug, Clone, Args)]
pub struct EstimatorArgs {
    /// Surrogate loss: hinge or logistic.
    #[arg(long)]
    surrogate: Option<String>,
    /// Class radius Lambda.
    #[arg(long)]
    lambda: Option<f64>,
    /// Training epochs.
    #[arg(long)]
    epochs: Option<usize>,
    /// Initial step size.
    #[arg(long)]
    step: Option<f64>,
    /// Directions of the oracle grid for inputs of dimension two or more.
    #[arg(long)]
    directions: Option<usize>,
    /// Largest grid accepted by the X-disc pair enumeration.
    #[arg(long)]
    grid_cap: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ToyArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    est: EstimatorArgs,
    /// Points per class and domain.
    #[arg(long)]
    per_class: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ConvergenceArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    est: EstimatorArgs,
    /// Per-domain sample sizes, comma-separated.
    #[arg(long, value_delimiter = ',')]
    n_grid: Option<Vec<usize>>,
}

#[derive(Debug, Args)]
pub struct RankArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    est: EstimatorArgs,
    /// Target dataset: an instance file, or `idx:IMAGES[,LABELS]`.
    #[arg(long)]
    target: Option<String>,
    /// Labeled source dataset, repeatable; suffix `@clean` or `@noisy` to tag it.
    #[arg(long = "source")]
    sources: Vec<String>,
    /// Measure: sdisc, dh or xdisc.
    #[arg(long)]
    measure: Option<String>,
    /// Size of the head counted for the clean score.
    #[arg(long)]
    top_k: Option<usize>,
    /// Run the synthetic clean/noisy study instead of ranking files.
    #[arg(long)]
    synthetic: bool,
    /// Noise levels of the synthetic study, comma-separated.
    #[arg(long, value_delimiter = ',')]
    sigmas: Option<Vec<f64>>,
    /// Repetitions of the synthetic study.
    #[arg(long)]
    reps: Option<usize>,
    /// Examples per domain in the synthetic study.
    #[arg(long)]
    n: Option<usize>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    est: EstimatorArgs,
    /// Per-domain sizes, comma-separated.
    #[arg(long, value_delimiter = ',')]
    sizes: Option<Vec<usize>>,
    /// Timed runs per method and size.
    #[arg(long)]
    repeats: Option<usize>,
    /// Directions of the X-disc enumeration grid.
    #[arg(long)]
    xdisc_directions: Option<usize>,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[command(flatten)]
    est: EstimatorArgs,
    /// Flat `key = value` file; flags take precedence over it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Labeled source dataset.
    #[arg(long)]
    source: Option<String>,
    /// Target dataset; labels, if any, are ignored.
    #[arg(long)]
    target: Option<String>,
    /// Measure: sdisc, dh or xdisc.
    #[arg(long)]
    measure: Option<String>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Toy(a) => commands::toy(a),
        Command::Convergence(a) => commands::convergence(a),
        Command::Rank(a) => commands::rank(a),
        Command::Bench(a) => commands::bench(a),
        Command::Estimate(a) => commands::estimate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("disckit: {e}");
            ExitCode::from(e.code())
        }
    }
}
