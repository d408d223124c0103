//! Command-line interface: dataset ingestion, model persistence, and one
//! subcommand family per model. Every run prints its fully resolved
//! configuration (defaults and seed included) as a `# config:` line, so any
//! output can be reproduced from its own log. Results go to stdout, errors
//! to stderr with a nonzero exit code.

mod commands;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "hdc",
    version,
    about = "Hyperdimensional computing models: classify, cluster, regress, and graph memories"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Supervised classification
    #[command(subcommand)]
    Classify(ClassifyCmd),
    /// Unsupervised k-means clustering
    #[command(subcommand)]
    Cluster(ClusterCmd),
    /// Continuous-target regression
    #[command(subcommand)]
    Regress(RegressCmd),
    /// Whole-graph hypervector memories
    #[command(subcommand)]
    Graph(GraphCmd),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Direction {
    Backward,
    Forward,
}

#[derive(Subcommand)]
pub enum ClassifyCmd {
    /// Fit a classifier and save it
    Fit(ClassifyFit),
    /// Predict labels for a dataset with a saved model
    Predict(ClassifyPredict),
    /// Stratified k-fold cross-validation
    Cv(ClassifyCv),
    /// Stepwise feature selection with importance reporting
    Select(ClassifySelect),
    /// Exhaustive hyperparameter sweep
    Tune(ClassifyTune),
}

#[derive(clap::Args)]
pub struct ClassifyFit {
    /// Training dataset (header; first column id, last column label)
    #[arg(long)]
    pub input: String,
    /// Where to write the model file
    #[arg(long)]
    pub output: String,
    #[arg(long, default_value_t = 10_000)]
    pub dim: usize,
    #[arg(long, default_value_t = 10)]
    pub levels: usize,
    /// Error-driven refinement epochs after the initial fit
    #[arg(long, default_value_t = 0)]
    pub retrain: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Quantize each feature against its own value range
    #[arg(long, default_value_t = false)]
    pub per_feature_ranges: bool,
    /// Fit the phase-encoded quantum pipeline instead of the classical one
    #[arg(long, default_value_t = false)]
    pub quantum: bool,
}

#[derive(clap::Args)]
pub struct ClassifyPredict {
    #[arg(long)]
    pub model: String,
    /// Dataset to predict (labeled or --unlabeled)
    #[arg(long)]
    pub input: String,
    /// Input has no target column
    #[arg(long, default_value_t = false)]
    pub unlabeled: bool,
    /// Hadamard-test shots for quantum models; 0 means exact similarity
    #[arg(long, default_value_t = 0)]
    pub shots: usize,
    /// Seed for shot sampling
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
}

#[derive(clap::Args)]
pub struct ClassifyCv {
    #[arg(long)]
    pub input: String,
    #[arg(long, default_value_t = 5)]
    pub folds: usize,
    #[arg(long, default_value_t = 10_000)]
    pub dim: usize,
    #[arg(long, default_value_t = 10)]
    pub levels: usize,
    #[arg(long, default_value_t = 0)]
    pub retrain: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = false)]
    pub per_feature_ranges: bool,
    #[arg(long, default_value_t = false)]
    pub quantum: bool,
    /// Hadamard-test shots in quantum mode; 0 means exact
    #[arg(long, default_value_t = 0)]
    pub shots: usize,
}

#[derive(clap::Args)]
pub struct ClassifySelect {
    #[arg(long)]
    pub input: String,
    #[arg(long, value_enum, default_value_t = Direction::Backward)]
    pub direction: Direction,
    /// Stop when a round scores below best-so-far minus this much
    #[arg(long, default_value_t = 0.0)]
    pub threshold: f64,
    #[arg(long, default_value_t = 5)]
    pub folds: usize,
    #[arg(long, default_value_t = 10_000)]
    pub dim: usize,
    #[arg(long, default_value_t = 10)]
    pub levels: usize,
    #[arg(long, default_value_t = 0)]
    pub retrain: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = false)]
    pub per_feature_ranges: bool,
}

#[derive(clap::Args)]
pub struct ClassifyTune {
    #[arg(long)]
    pub input: String,
    /// Dimensions to sweep, comma-separated
    #[arg(long = "grid-dim", value_delimiter = ',', default_value = "1000,10000")]
    pub grid_dim: Vec<usize>,
    /// Level counts to sweep, comma-separated
    #[arg(long = "grid-levels", value_delimiter = ',', default_value = "2,10")]
    pub grid_levels: Vec<usize>,
    /// Retrain epoch counts to sweep, comma-separated
    #[arg(long = "grid-retrain", value_delimiter = ',', default_value = "0")]
    pub grid_retrain: Vec<usize>,
    #[arg(long, default_value_t = 5)]
    pub folds: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = false)]
    pub per_feature_ranges: bool,
}

#[derive(Subcommand)]
pub enum ClusterCmd {
    /// Encode a dataset and cluster it
    Fit(ClusterFit),
    /// Assign rows to the clusters of a saved model
    Predict(ClusterPredict),
}

#[derive(clap::Args)]
pub struct ClusterFit {
    #[arg(long)]
    pub input: String,
    #[arg(long)]
    pub output: String,
    #[arg(long, default_value_t = 3)]
    pub k: usize,
    #[arg(long = "max-iter", default_value_t = 100)]
    pub max_iter: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 10_000)]
    pub dim: usize,
    #[arg(long, default_value_t = 10)]
    pub levels: usize,
    /// Input has no target column
    #[arg(long, default_value_t = false)]
    pub unlabeled: bool,
}

#[derive(clap::Args)]
pub struct ClusterPredict {
    #[arg(long)]
    pub model: String,
    #[arg(long)]
    pub input: String,
    #[arg(long, default_value_t = false)]
    pub unlabeled: bool,
}

#[derive(Subcommand)]
pub enum RegressCmd {
    /// Fit a regression model and save it
    Fit(RegressFit),
    /// Predict targets for a dataset with a saved model
    Predict(RegressPredict),
}

#[derive(clap::Args)]
pub struct RegressFit {
    /// Training dataset (header; first column id, last column numeric target)
    #[arg(long)]
    pub input: String,
    #[arg(long)]
    pub output: String,
    #[arg(long, default_value_t = 4096)]
    pub dim: usize,
    /// Number of parallel (cluster, regressor) pairs
    #[arg(long, default_value_t = 8)]
    pub k: usize,
    #[arg(long, default_value_t = 0.02)]
    pub lr: f64,
    #[arg(long, default_value_t = 50)]
    pub epochs: usize,
    /// Default to Hamming-based quantized inference
    #[arg(long, default_value_t = false)]
    pub quantized: bool,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
}

#[derive(clap::Args)]
pub struct RegressPredict {
    #[arg(long)]
    pub model: String,
    #[arg(long)]
    pub input: String,
    #[arg(long, default_value_t = false)]
    pub unlabeled: bool,
    /// Force Hamming-based quantized inference
    #[arg(long, default_value_t = false)]
    pub quantized: bool,
}

#[derive(Subcommand)]
pub enum GraphCmd {
    /// Encode an edge list into a graph model
    Build(GraphBuild),
    /// Query whether an edge exists
    Query(GraphQuery),
    /// Classify the weight of an assumed edge
    Predict(GraphQuery),
    /// Run error-mitigation rounds on a saved model
    Mitigate(GraphMitigate),
}

#[derive(clap::Args)]
pub struct GraphBuild {
    /// Edge list: source<TAB>target<TAB>weight-class, optional header
    #[arg(long)]
    pub input: String,
    #[arg(long)]
    pub output: String,
    /// Treat edges as directed
    #[arg(long, default_value_t = false)]
    pub directed: bool,
    #[arg(long, default_value_t = 10_000)]
    pub dim: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
}

#[derive(clap::Args)]
pub struct GraphQuery {
    #[arg(long)]
    pub model: String,
    /// Source node
    pub source: String,
    /// Target node
    pub target: String,
}

#[derive(clap::Args)]
pub struct GraphMitigate {
    #[arg(long)]
    pub model: String,
    /// Where to write the refined model (defaults to the input path)
    #[arg(long)]
    pub output: Option<String>,
    #[arg(long, default_value_t = 10)]
    pub rounds: usize,
}

fn main() {
    // die quietly when a downstream pipe closes, like other unix tools
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Classify(cmd) => commands::classify(cmd),
        Command::Cluster(cmd) => commands::cluster(cmd),
        Command::Regress(cmd) => commands::regress(cmd),
        Command::Graph(cmd) => commands::graph(cmd),
    };
    if let Err(e) = result {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
