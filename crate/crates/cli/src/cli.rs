use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use tdasum::summaries::SummarySpec;
use tdasum::{Kernel, SummaryKind};

#[derive(Debug, Parser)]
#[command(name = "tdasum", version, about = "Topological summaries of images and point clouds, and statistics on them")]
pub struct Cli {
    /// Worker threads; results do not depend on this
    #[arg(long, global = true, env = "TDASUM_THREADS")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Superlevel persistence diagram of a scalar field or a point cloud (via KDE)
    Diagram(DiagramArgs),
    /// Functional summary (or intensity surface) of persistence diagrams
    Summarize(SummarizeArgs),
    /// Two-sample permutation test on two groups of curves
    Test(TestArgs),
    /// Bootstrap confidence band for the mean curve
    Band(BandArgs),
    /// Prediction set for a new curve
    Predict(PredictArgs),
    /// kNN classification of curves, choosing k by leave-one-out if not given
    Classify(ClassifyArgs),
    /// Classical multidimensional scaling of curves or a distance matrix
    Mds(MdsArgs),
    /// Pick-up-sticks images
    SimulateStix(StixArgs),
    /// Gland point clouds
    SimulateGland(GlandArgs),
    /// Batch experiment described by a key = value config file
    Experiment(ExperimentArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Diagram(_) => "diagram",
            Command::Summarize(_) => "summarize",
            Command::Test(_) => "test",
            Command::Band(_) => "band",
            Command::Predict(_) => "predict",
            Command::Classify(_) => "classify",
            Command::Mds(_) => "mds",
            Command::SimulateStix(_) => "simulate-stix",
            Command::SimulateGland(_) => "simulate-gland",
            Command::Experiment(_) => "experiment",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WeightArg {
    Unit,
    /// Pointwise standard deviation of the input curves
    Sigma,
}

#[derive(Debug, Clone, Args)]
pub struct MetricArgs {
    /// Metric exponent p; `inf` for the supremum distance
    #[arg(long = "metric-p", default_value_t = 2.0)]
    pub p: f64,
    #[arg(long = "metric-weight", value_enum, default_value_t = WeightArg::Unit)]
    pub weight: WeightArg,
}

#[derive(Debug, Clone, Args)]
pub struct CurveInput {
    /// Summary kind for curve files that do not record one
    #[arg(long = "curve-kind")]
    pub kind: Option<SummaryKind>,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("input").required(true).args(["field", "cloud"])))]
pub struct DiagramArgs {
    /// Scalar field text file
    #[arg(long)]
    pub field: Option<PathBuf>,
    /// Point cloud CSV (`x,y`); needs --kde-h
    #[arg(long)]
    pub cloud: Option<PathBuf>,
    /// Highest homology dimension (0 or 1)
    #[arg(long, default_value_t = 1)]
    pub max_dim: usize,
    /// Apply local quadratic smoothing before computing the diagram
    #[arg(long)]
    pub smooth: bool,
    /// Neighbourhood fraction of the smoother
    #[arg(long, default_value_t = 0.001)]
    pub loess_frac: f64,
    /// KDE bandwidth for point clouds
    #[arg(long)]
    pub kde_h: Option<f64>,
    #[arg(long, default_value = "gaussian")]
    pub kde_kernel: Kernel,
    /// KDE grid size (pixels per side)
    #[arg(long, default_value_t = 128)]
    pub kde_size: usize,
    /// Split the field into ROWSxCOLS tiles and emit one diagram per tile
    #[arg(long, value_name = "ROWSxCOLS")]
    pub tiles: Option<String>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Landscape,
    Glandscape,
    Silhouette,
    Apf,
    Intensity,
}

#[derive(Debug, Args)]
pub struct SummarizeArgs {
    /// Diagram CSV files; one output per input
    #[arg(long = "diagram", required = true, num_args = 1..)]
    pub diagrams: Vec<PathBuf>,
    #[arg(long, value_enum)]
    pub kind: KindArg,
    /// Homology dimension summarized
    #[arg(long, default_value_t = 1)]
    pub dim: usize,
    /// Number of landscape orders
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    /// Kernel of generalized landscapes and intensities
    #[arg(long, default_value = "triangle")]
    pub kernel: Kernel,
    /// Bandwidth of generalized landscapes and intensities
    #[arg(long)]
    pub h: Option<f64>,
    /// Silhouette weight power, or intensity weight power
    #[arg(long, default_value_t = 1.0)]
    pub p: f64,
    /// Grid start (default: span of the diagrams, padded by 5%)
    #[arg(long, allow_hyphen_values = true, requires = "t1")]
    pub t0: Option<f64>,
    /// Grid end
    #[arg(long, allow_hyphen_values = true, requires = "t0")]
    pub t1: Option<f64>,
    /// Grid samples
    #[arg(long, default_value_t = 512)]
    pub m: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct TestArgs {
    #[arg(long = "group-a", required = true, num_args = 1..)]
    pub group_a: Vec<PathBuf>,
    #[arg(long = "group-b", required = true, num_args = 1..)]
    pub group_b: Vec<PathBuf>,
    #[command(flatten)]
    pub metric: MetricArgs,
    #[command(flatten)]
    pub curves: CurveInput,
    /// Random relabelings
    #[arg(long = "B", default_value_t = 1000)]
    pub b: usize,
    #[arg(long, required_unless_present = "exhaustive")]
    pub seed: Option<u64>,
    /// Enumerate every relabeling instead of sampling
    #[arg(long)]
    pub exhaustive: bool,
    /// Report (count + 1) / (B + 1) instead of count / B
    #[arg(long)]
    pub add_one: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Fixed,
    Variable,
}

#[derive(Debug, Args)]
pub struct BandArgs {
    #[arg(long = "curves", required = true, num_args = 1..)]
    pub curves: Vec<PathBuf>,
    #[command(flatten)]
    pub input: CurveInput,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long = "B", default_value_t = 1000)]
    pub b: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::Fixed)]
    pub mode: ModeArg,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[arg(long = "curves", required = true, num_args = 1..)]
    pub curves: Vec<PathBuf>,
    /// New curves to check against the prediction set
    #[arg(long = "query", num_args = 1..)]
    pub query: Vec<PathBuf>,
    #[command(flatten)]
    pub input: CurveInput,
    #[arg(long, default_value_t = 0.9)]
    pub gamma: f64,
    #[command(flatten)]
    pub metric: MetricArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[arg(long = "train", required = true, num_args = 1..)]
    pub train: Vec<PathBuf>,
    /// Labels CSV (`id,label`), ids in --train order
    #[arg(long)]
    pub labels: PathBuf,
    #[arg(long = "query", required = true, num_args = 1..)]
    pub query: Vec<PathBuf>,
    #[command(flatten)]
    pub input: CurveInput,
    /// Neighbours; chosen by leave-one-out over --k-candidates when absent
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, value_delimiter = ',', default_value = "1,3,5,7,9")]
    pub k_candidates: Vec<usize>,
    #[command(flatten)]
    pub metric: MetricArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("input").required(true).args(["matrix", "curves"])))]
pub struct MdsArgs {
    /// Square headerless distance matrix CSV
    #[arg(long)]
    pub matrix: Option<PathBuf>,
    #[arg(long = "curves", num_args = 1..)]
    pub curves: Vec<PathBuf>,
    #[command(flatten)]
    pub input: CurveInput,
    #[command(flatten)]
    pub metric: MetricArgs,
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct StixArgs {
    #[arg(long, default_value_t = 60)]
    pub n_sticks: usize,
    /// Chi-squared degrees of freedom of the stick thickness
    #[arg(long, default_value_t = 5.0)]
    pub df: f64,
    #[arg(long, default_value_t = 64)]
    pub rows: usize,
    #[arg(long, default_value_t = 64)]
    pub cols: usize,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub foreground: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub background: f64,
    /// Coverage-weighted instead of binary rasterization
    #[arg(long)]
    pub anti_alias: bool,
    /// Number of images
    #[arg(long, default_value_t = 1)]
    pub count: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct GlandArgs {
    #[arg(long, default_value_t = 150)]
    pub n_points: usize,
    #[arg(long, default_value_t = 0.3)]
    pub radius: f64,
    /// 0 gives a clean ring (type A), 1 uniform clutter (type D)
    #[arg(long, default_value_t = 0.0)]
    pub irregularity: f64,
    #[arg(long, default_value_t = 0.02)]
    pub jitter: f64,
    /// Number of clouds
    #[arg(long, default_value_t = 1)]
    pub count: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    /// key = value experiment description
    #[arg(long)]
    pub config: PathBuf,
    /// Overrides the config's seed
    #[arg(long)]
    pub seed: Option<u64>,
    /// Summaries to compare, overriding the config; gland runs pick the best by
    /// leave-one-out (e.g. `glandscape:triangle:0.05:1,glandscape:triangle:0.1:1`)
    #[arg(long, value_delimiter = ',')]
    pub summaries: Vec<SummarySpec>,
    #[arg(long)]
    pub out: PathBuf,
}
