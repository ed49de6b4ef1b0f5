use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "vpseval",
    version,
    about = "Video panoptic segmentation evaluation and ensemble fusion"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Video panoptic quality over spans of k frames.
    Vpq(VpqArgs),
    /// Segmentation and tracking quality.
    Stq(StqArgs),
    /// Correct panoptic videos with semantic videos.
    Fuse(FuseArgs),
    /// Generate synthetic ground truth, oracle semantics and corrupted predictions.
    Synth(SynthArgs),
    /// Check and re-render a saved report.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Args)]
pub struct EvalInputs {
    /// Ground-truth root: one panoptic video directory per video id.
    #[arg(long)]
    pub gt: PathBuf,
    /// Prediction root with the same video ids.
    #[arg(long)]
    pub pred: PathBuf,
    #[arg(long)]
    pub categories: PathBuf,
    /// Worker threads; 0 picks one per core, 1 runs sequentially.
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    /// Report path (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct VpqArgs {
    #[command(flatten)]
    pub inputs: EvalInputs,
    /// Window spans, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "1,2,4,6")]
    pub k: Vec<usize>,
    /// Average per-video VPQ^k instead of pooling tallies over the dataset.
    #[arg(long)]
    pub per_video_average: bool,
}

#[derive(Debug, Clone, Args)]
pub struct StqArgs {
    #[command(flatten)]
    pub inputs: EvalInputs,
    /// Report AQ = 1 when ground truth holds no thing tracks instead of failing.
    #[arg(long)]
    pub empty_aq_as_one: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScopeArg {
    PerCategory,
    WholeVideo,
}

#[derive(Debug, Clone, Args)]
pub struct FuseArgs {
    /// Panoptic prediction root.
    #[arg(long)]
    pub pred: PathBuf,
    /// Semantic prediction root with the same video ids.
    #[arg(long)]
    pub semantic: PathBuf,
    #[arg(long)]
    pub categories: PathBuf,
    /// Output root for the fused panoptic videos.
    #[arg(long)]
    pub out: PathBuf,
    /// Where to write the audit report (default: stdout).
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    #[arg(long, default_value_t = 0.5)]
    pub stuff_vote_threshold: f64,
    #[arg(long, default_value_t = 0.5)]
    pub thing_vote_threshold: f64,
    #[arg(long)]
    pub no_stuff_correction: bool,
    #[arg(long)]
    pub no_single_thing: bool,
    /// Assign panoptic-void pixels to the stuff category the semantic video reports.
    #[arg(long)]
    pub fill_void: bool,
    #[arg(long, value_enum, default_value_t = ScopeArg::PerCategory)]
    pub single_thing_scope: ScopeArg,
}

#[derive(Debug, Clone, Args)]
pub struct SynthArgs {
    /// Scene spec (JSON).
    #[arg(long)]
    pub scene: PathBuf,
    /// Corruption spec (JSON); when given, predictions are written under `pred/`.
    #[arg(long)]
    pub corruption: Option<PathBuf>,
    /// Category file (default: a built-in 12-category demo set).
    #[arg(long)]
    pub categories: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    /// Number of videos; video i uses seed + i.
    #[arg(long, default_value_t = 1)]
    pub videos: usize,
    /// Overrides the scene spec's seed.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
}

#[derive(Debug, Clone, Args)]
pub struct ReportArgs {
    /// A report written by `vpq`, `stq` or `fuse`.
    pub input: PathBuf,
    /// Where to write the table (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}
