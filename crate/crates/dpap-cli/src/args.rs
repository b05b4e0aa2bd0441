//! Command-line surface, parsed with clap.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "dpap",
    version,
    about = "Exemplar clustering with a nonparametric cluster-size prior",
    disable_help_subcommand = true
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate synthetic datasets (mixture points with ground truth)
    Gen(GenArgs),
    /// Cluster a dataset or similarity matrix with one solver
    Cluster(ClusterArgs),
    /// Score a clustering against a reference
    Eval(EvalArgs),
    /// Run the full solver roster over many datasets and write CSVs
    Bench(BenchArgs),
    /// Compose a similarity matrix from a superpixel graph
    Segsim(SegsimArgs),
}

/// Generator settings shared by `gen` and `bench`.
#[derive(Debug, Args, Clone)]
pub struct GenParams {
    /// Points per dataset
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    /// Concentration of the partition process
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    /// Coordinates per point
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    /// Variance of cluster centers around the origin
    #[arg(long, default_value_t = 1.0)]
    pub base_variance: f64,
    /// Variance of members around their center
    #[arg(long, default_value_t = 0.5)]
    pub cond_variance: f64,
    /// Seed of the first dataset; dataset i uses seed + i
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[command(flatten)]
    pub params: GenParams,
    /// How many datasets to write (0 writes none and succeeds)
    #[arg(long, default_value_t = 1000)]
    pub count: usize,
    /// Output directory [default: $DPAP_OUT_DIR or .]
    #[arg(long, value_name = "DIR")]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ClusterArgs {
    /// Solver: dpap, ap, icm1, or icmn
    pub algorithm: String,
    /// Dataset text file or similarity CSV (detected from the first line)
    pub input: PathBuf,
    /// Concentration override when deriving the matrix from a dataset
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Message damping in [0, 1) (dpap and ap only)
    #[arg(long)]
    pub damping: Option<f64>,
    /// Convergence threshold on the largest message change (dpap and ap only)
    #[arg(long)]
    pub tol: Option<f64>,
    /// Iteration cap (message iterations, or improvement passes for icm)
    #[arg(long)]
    pub max_iters: Option<usize>,
    /// Cluster-size prior: dp, ap, or table:FILE (not for the ap solver)
    #[arg(long)]
    pub prior: Option<String>,
    /// Replace every diagonal entry of the matrix
    #[arg(long, allow_negative_numbers = true)]
    pub self_sim: Option<f64>,
    /// Multiply every matrix entry by this factor (> 0)
    #[arg(long)]
    pub scale: Option<f64>,
    /// Preference offset added to the diagonal (ap only)
    #[arg(long, allow_negative_numbers = true)]
    pub d: Option<f64>,
    /// Recorded in the result for provenance; every solver is deterministic
    #[arg(long)]
    pub seed: Option<u64>,
    /// Exit with code 3 when the run does not converge
    #[arg(long)]
    pub strict: bool,
    /// Write the result JSON here instead of standard output
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EvalFormat {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Clustering to score: result JSON or a labels file
    pub result: PathBuf,
    /// Reference: dataset file (scores against its model too), labels file,
    /// or another result JSON
    pub reference: PathBuf,
    /// Output format
    #[arg(long, value_enum, default_value_t = EvalFormat::Json)]
    pub format: EvalFormat,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[command(flatten)]
    pub params: GenParams,
    /// How many datasets to generate
    #[arg(long, default_value_t = 100)]
    pub count: usize,
    /// Load dataset_*.txt from here instead of generating
    #[arg(long, value_name = "DIR")]
    pub data_dir: Option<PathBuf>,
    /// Comma-separated roster restriction (dpap,ap,icm1,icmn)
    #[arg(long)]
    pub algos: Option<String>,
    /// Record wall-clock times (off by default so reruns are byte-identical)
    #[arg(long)]
    pub timings: bool,
    /// Output directory for the CSVs [default: $DPAP_OUT_DIR or .]
    #[arg(long, value_name = "DIR")]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SegsimArgs {
    /// Superpixel graph JSON
    pub graph: PathBuf,
    /// Strength of the color term [default: automatic]
    #[arg(long)]
    pub tau_color: Option<f64>,
    /// Strength of the boundary-path term [default: automatic]
    #[arg(long)]
    pub tau_edge: Option<f64>,
    /// Diagonal (exemplar preference) before scaling
    #[arg(long, allow_negative_numbers = true)]
    pub self_sim: Option<f64>,
    /// Overall multiplier applied to every entry (> 0)
    #[arg(long)]
    pub scale: Option<f64>,
    /// Accept 8-bit color components (0..255) and divide them by 255
    #[arg(long)]
    pub rescale: bool,
    /// Write the similarity CSV here instead of standard output
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}
