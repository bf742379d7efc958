use clap::{Args, Parser, Subcommand, ValueEnum};
use fcd_core::{DistanceOrder, ScheduleKind};
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(name = "fcd", version, about = "Flexible-weighted Chamfer distance toolkit")]
pub struct Cli {
    /// JSON object of flag values (long names as keys); explicit flags win.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a predicted cloud against a ground-truth cloud.
    Metrics(MetricsArgs),
    /// Dump (epoch, alpha, beta) for every epoch of a weight schedule.
    Schedule(ScheduleCmdArgs),
    /// Two-point stalemate sweep: values and gradients along the target segment.
    Sweep(SweepArgs),
    /// Gradient descent of free point coordinates against a target cloud.
    Optimize(OptimizeArgs),
    /// Metrics for every prediction / ground-truth pair in a directory.
    Batch(BatchArgs),
    /// Build a clustered and a uniform prediction with equal Chamfer distance.
    Ambiguity(AmbiguityArgs),
    /// Re-run the command recorded in a manifest.
    Replay(ReplayArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MetricName {
    #[value(name = "cd_l1")]
    CdL1,
    #[value(name = "cd_l2")]
    CdL2,
    Dcd,
    Emd,
    Fscore,
    Hausdorff,
    P2f,
    Fidelity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
}

/// Metric selection and parameters shared by `metrics` and `batch`.
#[derive(Debug, Clone, Args)]
pub struct MetricOptions {
    /// Comma-separated subset of metrics (default: every applicable one).
    #[arg(long, value_enum, value_delimiter = ',')]
    pub metrics: Option<Vec<MetricName>>,
    #[arg(long, default_value_t = fcd_core::metrics::DEFAULT_FSCORE_THRESHOLD)]
    pub fscore_threshold: f64,
    /// Density-aware Chamfer temperature.
    #[arg(long, default_value_t = fcd_core::metrics::DEFAULT_DCD_TEMPERATURE)]
    pub temperature: f64,
    /// Use the Sinkhorn approximation for EMD (also when sizes differ or exceed the exact cap).
    #[arg(long)]
    pub emd_approx: bool,
    /// Report EMD as the sum of matched distances instead of the mean.
    #[arg(long)]
    pub emd_sum: bool,
    #[arg(long, default_value_t = 200)]
    pub emd_iterations: usize,
    #[arg(long, default_value_t = 0.01)]
    pub emd_epsilon: f64,
    /// Seeds the subsampling used by approximate EMD on unequal sizes.
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct MetricsArgs {
    /// Predicted cloud (.xyz or ASCII .ply).
    pub pred: PathBuf,
    /// Ground-truth cloud.
    pub gt: PathBuf,
    /// Ground-truth surface for point-to-face distance (ASCII .ply).
    #[arg(long)]
    pub mesh: Option<PathBuf>,
    /// Partial input cloud for fidelity.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[command(flatten)]
    pub options: MetricOptions,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,
    /// Write metrics.json, metrics.csv and manifest.json here.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ScheduleArgs {
    #[arg(long, default_value = "static")]
    pub schedule: ScheduleKind,
    /// Upper bound of the global weight.
    #[arg(long, default_value_t = 2.0)]
    pub theta: f64,
    /// Lower bound of the global weight and fixed local weight.
    #[arg(long, default_value_t = 1.0)]
    pub tau: f64,
    /// Switch epoch of the stair and abridged-linear schedules.
    #[arg(long, default_value_t = 200)]
    pub transition: u32,
    /// Total number of epochs.
    #[arg(long, default_value_t = 400)]
    pub total: u32,
    /// Decay rate of the exponential schedule.
    #[arg(long, default_value_t = 200.0)]
    pub sigma: f64,
}

#[derive(Debug, Args)]
pub struct ScheduleCmdArgs {
    #[command(flatten)]
    pub schedule: ScheduleArgs,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, default_value_t = 0.6)]
    pub start: f64,
    #[arg(long, default_value_t = 3.4)]
    pub end: f64,
    #[arg(long, default_value_t = 0.1)]
    pub step: f64,
    /// Local weight of the asymmetric objective.
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    /// Global weight of the asymmetric objective.
    #[arg(long, default_value_t = 2.0)]
    pub beta: f64,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Benchmark {
    ClusteredGrid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ObjectiveArg {
    CdL1,
    CdL2,
    Fcd,
    DcdLoss,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum UpdateArg {
    Plain,
    Momentum,
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    /// Initial cloud (or initial coarse cloud with --coarse-count).
    #[arg(long, conflicts_with = "benchmark", required_unless_present = "benchmark")]
    pub init: Option<PathBuf>,
    #[arg(long, conflicts_with = "benchmark", required_unless_present = "benchmark")]
    pub target: Option<PathBuf>,
    /// Built-in problem supplying both clouds (and default steps / step size).
    #[arg(long, value_enum)]
    pub benchmark: Option<Benchmark>,
    #[arg(long, value_enum, default_value_t = ObjectiveArg::Fcd)]
    pub objective: ObjectiveArg,
    /// Distance order of the fcd objective.
    #[arg(long, default_value = "l2")]
    pub order: DistanceOrder,
    /// Temperature of the dcd-loss objective.
    #[arg(long, default_value_t = fcd_core::metrics::DEFAULT_DCD_TEMPERATURE)]
    pub temperature: f64,
    #[command(flatten)]
    pub schedule: ScheduleArgs,
    /// Descent steps (default 2000 for the benchmark, else 1000).
    #[arg(long)]
    pub steps: Option<usize>,
    /// Step size (default 0.05 for the benchmark, else 0.01).
    #[arg(long)]
    pub step_size: Option<f64>,
    #[arg(long, value_enum, default_value_t = UpdateArg::Plain)]
    pub update: UpdateArg,
    #[arg(long, default_value_t = 0.9)]
    pub momentum: f64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 10)]
    pub record_every: usize,
    /// Indices of points that never move.
    #[arg(long, value_delimiter = ',')]
    pub pin: Vec<usize>,
    /// Skip per-row cd/dcd/emd snapshots in the trace.
    #[arg(long)]
    pub no_snapshots: bool,
    /// Coarse point count; enables the coarse-to-fine hierarchy.
    #[arg(long, requires = "children")]
    pub coarse_count: Option<usize>,
    /// Fine points spawned per coarse point.
    #[arg(long, requires = "coarse_count")]
    pub children: Option<usize>,
    #[arg(long, default_value_t = 0.01)]
    pub offset_init_scale: f64,
    #[arg(long)]
    pub freeze_offsets: bool,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct BatchArgs {
    /// Directory holding pred/ and gt/ subdirectories with matching file names.
    pub dir: PathBuf,
    /// File-name pattern selecting predictions.
    #[arg(long, default_value = "*.xyz")]
    pub glob: String,
    #[arg(long, default_value_t = 1)]
    pub parallelism: usize,
    #[command(flatten)]
    pub options: MetricOptions,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AmbiguityArgs {
    #[arg(long, default_value_t = 64)]
    pub n: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Target grid spacing (default two kernel lengths of the temperature).
    #[arg(long)]
    pub spacing: Option<f64>,
    #[arg(long, default_value_t = fcd_core::metrics::DEFAULT_DCD_TEMPERATURE)]
    pub temperature: f64,
    /// Write target.xyz, clustered.xyz, uniform.xyz, report.json and manifest.json here.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    pub manifest: PathBuf,
    #[arg(long)]
    pub out_dir: PathBuf,
}
