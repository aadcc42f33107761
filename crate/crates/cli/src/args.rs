//! Flag definitions. Every value flag is optional so that a config file can
//! supply it; unset values fall back to command defaults.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "wrv",
    version,
    about = "Online regression with weighted rolling-validation selection"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Univariate study: four sieve-SGD candidates of different smoothness.
    Example1(ExperimentArgs),
    /// Ten-dimensional study: the eight-candidate sieve-SGD table.
    Example2(ExperimentArgs),
    /// Perturb-one stability curve and fitted decay exponent.
    Stability(StabilityArgs),
    /// Online selection over CSV rows `x1,...,xp,y` from a file or stdin.
    Stream(StreamArgs),
    /// Quantile band from two pinball-loss candidate sets.
    Quantile(QuantileArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Base random seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory (created if missing).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads for replicates; defaults to the available cores.
    #[arg(long)]
    pub jobs: Option<usize>,
    /// TOML config file; explicit flags take precedence over its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ExperimentArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Weight exponents, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub xi: Option<Vec<f64>>,
    /// Number of replicates.
    #[arg(long)]
    pub reps: Option<usize>,
    /// Samples per replicate.
    #[arg(long)]
    pub n: Option<u64>,
    /// Test covariates for the oracle error; 0 skips it.
    #[arg(long)]
    pub n_test: Option<usize>,
    /// 500 replicates of 31623 samples unless overridden.
    #[arg(long)]
    pub paper_scale: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Parametric,
    Sieve,
    BatchSieve,
    Constant,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum JRuleArg {
    First,
    Middle,
}

#[derive(Debug, Clone, Args)]
pub struct StabilityArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Estimator family.
    #[arg(long, value_enum)]
    pub family: Option<FamilyArg>,
    /// Sample sizes, comma separated and increasing.
    #[arg(long, value_delimiter = ',')]
    pub grid: Option<Vec<u64>>,
    #[arg(long)]
    pub reps: Option<usize>,
    /// Which sample the twin replaces.
    #[arg(long, value_enum)]
    pub j_rule: Option<JRuleArg>,
    /// Replace the sample by itself; every difference must then be zero.
    #[arg(long)]
    pub coupled_identical: bool,
    /// Test covariates per replicate.
    #[arg(long)]
    pub n_test: Option<usize>,
    /// Basis exponent of the batch sieve, `J = ceil(n^alpha)`.
    #[arg(long)]
    pub alpha: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct StreamArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// CSV input file, or `-` for stdin.
    #[arg(long)]
    pub input: String,
    /// Weight exponent (overrides the config's single `xi`).
    #[arg(long)]
    pub xi: Option<f64>,
    /// Write the harness state here when the run stops.
    #[arg(long)]
    pub snapshot: Option<PathBuf>,
    /// Continue from a snapshot, skipping the rows it already consumed.
    #[arg(long)]
    pub resume: Option<PathBuf>,
    /// Stop once this many samples have been consumed in total, as if interrupted.
    #[arg(long)]
    pub max_rows: Option<u64>,
}

#[derive(Debug, Clone, Args)]
pub struct QuantileArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Lower and upper quantile levels.
    #[arg(long, value_delimiter = ',')]
    pub alpha: Option<Vec<f64>>,
    /// Training samples.
    #[arg(long)]
    pub n: Option<u64>,
    #[arg(long)]
    pub xi: Option<f64>,
    /// Test samples for the coverage estimate.
    #[arg(long)]
    pub n_test: Option<usize>,
}
