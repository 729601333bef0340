use clap::{Args, Parser, Subcommand, ValueEnum};
use randsum::biasing::CouplingKind;
use randsum::bounds::{BoundConstants, Metric, TheoremId, BERRY_ESSEEN_CK};
use randsum::montecarlo::DEFAULT_CHUNK;
use randsum::rng::DEFAULT_SEED;
use serde::Serialize;
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(name = "randsum", version, about = "Normal approximation bounds for random sums")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate error bounds for one model.
    Bound(BoundArgs),
    /// Simulate W and compare the empirical distances with the bounds.
    Simulate(SimulateArgs),
    /// Run `simulate` over a grid of models and emit CSV rows.
    Sweep(SweepArgs),
    /// Run the built-in property suites.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricArg {
    #[value(alias = "k")]
    Kolmogorov,
    #[value(alias = "w")]
    Wasserstein,
    Both,
}

impl MetricArg {
    pub fn metrics(self) -> Vec<Metric> {
        match self {
            MetricArg::Kolmogorov => vec![Metric::Kolmogorov],
            MetricArg::Wasserstein => vec![Metric::Wasserstein],
            MetricArg::Both => vec![Metric::Kolmogorov, Metric::Wasserstein],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Stein,
    Bias,
    Metric,
    All,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ConstantArgs {
    /// Berry-Esseen constant C_K in (0, 0.5].
    #[arg(long, default_value_t = BERRY_ESSEEN_CK)]
    pub ck: f64,
    /// Use 2 C_K with the given --ck instead of the default 2 C_K = 1.
    #[arg(long)]
    pub exact_2ck: bool,
    /// Constant of the hypergeometric Kolmogorov route.
    #[arg(long, default_value_t = 1.0)]
    pub hyper_k: f64,
}

impl ConstantArgs {
    pub fn resolve(&self) -> randsum::Result<BoundConstants> {
        BoundConstants::new(self.ck, !self.exact_2ck, self.hyper_k)
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CouplingArgs {
    /// Size-bias coupling; defaults to the one built for the index family.
    #[arg(long)]
    #[serde(serialize_with = "ser_display_opt")]
    pub coupling: Option<CouplingKind>,
    /// CSV of (n, n_s, probability) giving the joint law of (N, N^s).
    #[arg(long, conflicts_with = "coupling")]
    pub joint_pmf: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SelectionArgs {
    /// Bounds to evaluate (repeatable or comma separated); every applicable one when omitted.
    #[arg(long, value_delimiter = ',')]
    #[serde(serialize_with = "ser_display_vec")]
    pub theorem: Vec<TheoremId>,
    #[arg(long, value_enum, default_value_t = MetricArg::Both)]
    pub metric: MetricArg,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BoundArgs {
    /// Index law, e.g. `poisson:lambda=100`.
    #[arg(long)]
    pub index: String,
    /// Summand law, e.g. `exp:rate=1`.
    #[arg(long)]
    pub summand: String,
    #[command(flatten)]
    #[serde(flatten)]
    pub coupling: CouplingArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub selection: SelectionArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub constants: ConstantArgs,
    /// Replications for coupling statistics that have no exact form.
    #[arg(long, default_value_t = 200_000)]
    pub reps: u64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct RunArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub coupling: CouplingArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub selection: SelectionArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub constants: ConstantArgs,
    /// Replications of W.
    #[arg(long, default_value_t = 100_000)]
    pub reps: u64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Worker threads; 0 uses every core. Results do not depend on it.
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    #[arg(long, default_value_t = DEFAULT_CHUNK)]
    pub chunk_size: u64,
    /// Replications for coupling statistics that have no exact form.
    #[arg(long, default_value_t = 200_000)]
    pub coupling_reps: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SimulateArgs {
    #[arg(long)]
    pub index: String,
    #[arg(long)]
    pub summand: String,
    #[command(flatten)]
    #[serde(flatten)]
    pub run: RunArgs,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SweepArgs {
    /// Index laws; repeatable, and `{a,b,..}` expands to one spec per choice.
    #[arg(long, required = true)]
    pub index: Vec<String>,
    /// Summand laws; repeatable with the same expansion.
    #[arg(long, required = true)]
    pub summand: Vec<String>,
    #[command(flatten)]
    #[serde(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = Suite::All)]
    pub suite: Suite,
    /// Replications for the Monte Carlo checks.
    #[arg(long, default_value_t = 200_000)]
    pub reps: u64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn ser_display_opt<T: std::fmt::Display, S: serde::Serializer>(v: &Option<T>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(v) => s.collect_str(v),
        None => s.serialize_none(),
    }
}

fn ser_display_vec<T: std::fmt::Display, S: serde::Serializer>(v: &[T], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|t| t.to_string()))
}
