use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "sgl",
    version,
    about = "Sparse gradient learning for variable selection and dimension reduction"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit at one λ, then report selection, S-EGCM spectrum and EDR directions.
    Fit(FitArgs),
    /// Fit and report the selected variables and their gradient norms only.
    Select(FitArgs),
    /// Fit and report EDR directions and sample projections.
    Edr(EdrArgs),
    /// Regularization path (SGL row norms or LASSO coefficients) per λ.
    Path(PathArgs),
    /// Grid search by leave-one-out error.
    Tune(TuneArgs),
    /// Write a synthetic dataset as CSV.
    Simulate(SimulateArgs),
    /// Variable-selection frequencies of SGL and LASSO over repeated Turlach draws.
    Benchmark(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Regression,
    Classification,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SyntheticArg {
    Turlach,
    Spheres,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KernelArg {
    /// `xᵀu + 1`
    Linear1,
    /// `xᵀu`
    Linear,
    Gaussian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReduceArg {
    On,
    Off,
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Sgl,
    Lasso,
}

#[derive(Debug, Clone, Args)]
pub struct DataArgs {
    /// Task; inferred from --synthetic when omitted.
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    /// CSV with a header row; one sample per row.
    #[arg(long, conflicts_with = "synthetic")]
    pub input: Option<PathBuf>,
    /// Held-out CSV (classification). Both sets are normalized with training statistics.
    #[arg(long, requires = "input")]
    pub test: Option<PathBuf>,
    /// Response column name.
    #[arg(long, default_value = "y")]
    pub response: String,
    /// Label string coded as +1; otherwise labels must be numeric ±1.
    #[arg(long)]
    pub positive_label: Option<String>,
    #[arg(long, value_enum)]
    pub synthetic: Option<SyntheticArg>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub p: Option<usize>,
    /// Noise standard deviation of the synthetic model.
    #[arg(long)]
    pub sigma: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct SolverArgs {
    /// Regression penalty λ.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Classification ridge penalty on f⁰.
    #[arg(long)]
    pub lambda1: Option<f64>,
    /// Classification group penalty.
    #[arg(long)]
    pub lambda2: Option<f64>,
    /// λ (regression) or λ₂ (classification) as a fraction of λ_max.
    #[arg(long)]
    pub lambda_rel: Option<f64>,
    /// Pick λ by leave-one-out error over the default grid.
    #[arg(long)]
    pub auto_lambda: bool,
    /// Pick λ so that exactly this many variables are selected (regression).
    #[arg(long)]
    pub target_count: Option<usize>,
    /// Fixed step size; default 1/L.
    #[arg(long)]
    pub delta: Option<f64>,
    /// Default: linear1 for regression, gaussian for classification.
    #[arg(long, value_enum)]
    pub kernel: Option<KernelArg>,
    /// `gaussian` or `knn:K`.
    #[arg(long, default_value = "gaussian")]
    pub weights: String,
    /// Weight bandwidth: a positive value or `median-half`.
    #[arg(long, default_value = "median-half")]
    pub bandwidth: String,
    /// Gaussian kernel bandwidth: a positive value or `median-half`.
    #[arg(long, default_value = "median-half")]
    pub kernel_bandwidth: String,
    #[arg(long, value_enum, default_value = "auto")]
    pub reduce: ReduceArg,
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    #[arg(long, default_value_t = 10_000)]
    pub max_iter: usize,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// JSON record destination; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Flat TSV table (path, tune and benchmark).
    #[arg(long)]
    pub tsv: Option<PathBuf>,
    /// Exit with code 3 when a solve hits the iteration cap.
    #[arg(long)]
    pub strict: bool,
}

#[derive(Debug, Clone, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct EdrArgs {
    #[command(flatten)]
    pub fit: FitArgs,
    /// Number of directions; default keeps eigenvalues above 1e-8 of the largest.
    #[arg(long)]
    pub dims: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct PathArgs {
    #[command(flatten)]
    pub fit: FitArgs,
    #[arg(long, value_enum, default_value = "sgl")]
    pub method: MethodArg,
    /// `auto`, `log:COUNT:RATIO`, `rel:a,b,..` (fractions of λ_max) or `a,b,..`.
    #[arg(long, default_value = "auto")]
    pub grid: String,
}

#[derive(Debug, Clone, Args)]
pub struct TuneArgs {
    #[command(flatten)]
    pub fit: FitArgs,
    /// λ (regression) or λ₂ (classification) grid, same syntax as `path --grid`.
    #[arg(long, default_value = "auto")]
    pub grid: String,
    /// λ₁ values for classification, comma separated.
    #[arg(long)]
    pub grid1: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// CSV destination; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    #[arg(long, default_value_t = 100)]
    pub repeats: usize,
    /// Base seed; repeat r uses seed + r.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 5)]
    pub target_count: usize,
    #[arg(long, default_value = "knn:10")]
    pub weights: String,
    #[arg(long, default_value = "median-half")]
    pub bandwidth: String,
    #[arg(long, value_enum, default_value = "linear1")]
    pub kernel: KernelArg,
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    #[arg(long, default_value_t = 10_000)]
    pub max_iter: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}
