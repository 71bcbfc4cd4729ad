use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use probjss::{Algorithm, QChoice, QLevel};

#[derive(Debug, Parser)]
#[command(
    name = "probjss",
    version,
    about = "Job-shop scheduling with probabilistic durations"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write random square instances, one file per (base instance, uncertainty level).
    Generate(GenerateArgs),
    /// Run an algorithm on instance files and append one result row per run.
    Solve(SolveArgs),
    /// Lower bound from the q-deterministic problem.
    Bound(BoundArgs),
    /// Aggregate result files into tables.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Jobs, machines and activities per job.
    #[arg(long)]
    pub n: usize,
    /// Comma-separated uncertainty levels.
    #[arg(long, value_delimiter = ',', default_value = "0.1,0.5,1")]
    pub u: Vec<f64>,
    /// Number of base deterministic instances.
    #[arg(long, default_value_t = 10)]
    pub count: usize,
    #[arg(long, env = "PROBJSS_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Output directory, created if missing.
    #[arg(long, short, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct QArgs {
    /// Literal q value.
    #[arg(long, conflicts_with = "qmode")]
    pub q: Option<f64>,
    /// Table q value [default: q1].
    #[arg(long)]
    pub qmode: Option<QLevel>,
}

impl QArgs {
    pub fn choice(&self) -> QChoice {
        match (self.q, self.qmode) {
            (Some(q), _) => QChoice::Fixed(q),
            (None, Some(level)) => QChoice::Level(level),
            (None, None) => QChoice::Level(QLevel::Q1),
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct BudgetArgs {
    /// Seconds per run before scaling [default: 600, none when --work-limit is given].
    #[arg(long)]
    pub time_limit: Option<f64>,
    /// Multiplies every time limit.
    #[arg(long, default_value_t = 1.0)]
    pub global_time_scale: f64,
    /// Work units (nodes, simulations, tabu moves) per run; runs capped only
    /// by work are reproducible.
    #[arg(long)]
    pub work_limit: Option<u64>,
}

pub const DEFAULT_TIME_LIMIT: f64 = 600.0;

impl BudgetArgs {
    /// Effective time limit in seconds.
    pub fn seconds(&self) -> Option<f64> {
        let base = match (self.time_limit, self.work_limit) {
            (Some(t), _) => Some(t),
            (None, Some(_)) => None,
            (None, None) => Some(DEFAULT_TIME_LIMIT),
        };
        base.map(|t| t * self.global_time_scale)
    }
}

#[derive(Debug, Clone, Args)]
pub struct SolveArgs {
    #[arg(required = true)]
    pub instances: Vec<PathBuf>,
    #[arg(long, short)]
    pub algorithm: Algorithm,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long = "K", visible_alias = "k", default_value_t = 2.0)]
    pub k: f64,
    /// Monte Carlo trials per simulation.
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[command(flatten)]
    pub q: QArgs,
    #[command(flatten)]
    pub budget: BudgetArgs,
    /// Seed of the first run; run r uses seed + r.
    #[arg(long, env = "PROBJSS_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 10)]
    pub runs: u64,
    /// Reuse the estimate of a solution simulated before.
    #[arg(long)]
    pub dedupe_sims: bool,
    /// Seconds of phase 1 in the timed better-solution variants.
    #[arg(long)]
    pub t_initial: Option<f64>,
    /// Result file to append to; stdout if omitted.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct BoundArgs {
    #[arg(required = true)]
    pub instances: Vec<PathBuf>,
    #[command(flatten)]
    pub q: QArgs,
    /// Used only to compute table q values.
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[command(flatten)]
    pub budget: BudgetArgs,
    #[arg(long, env = "PROBJSS_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Bound file to append to; stdout if omitted.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Metric {
    Mnpm,
    Mndm,
    Correlation,
    Ttest,
}

#[derive(Debug, Clone, Args)]
pub struct ReportArgs {
    /// Result files or directories of them.
    #[arg(required = true)]
    pub results: Vec<PathBuf>,
    /// Bound file, or a result file whose best D per instance is used
    /// [default: the best D in the results themselves].
    #[arg(long)]
    pub bounds: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Metric::Mnpm)]
    pub metric: Metric,
    /// Reference algorithm for mndm [default: first algorithm present].
    #[arg(long)]
    pub reference: Option<Algorithm>,
    #[arg(long, default_value_t = 10_000)]
    pub permutations: usize,
    #[arg(long, default_value_t = 0.005)]
    pub p_threshold: f64,
    #[arg(long, env = "PROBJSS_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Also write the table as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}
