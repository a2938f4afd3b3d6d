use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "relnodes",
    version,
    about = "Find the variables relevant to queries about a target set"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Relevant set of the targets by frontier search over marginal tests.
    Relevant(RelevantArgs),
    /// Drop context nodes that are irrelevant given the rest of the context.
    Purge(PurgeArgs),
    /// Minimal undirected independence map.
    Ug(UgArgs),
    /// Relevant set by exhaustive search over conditioning sets (exact models only).
    Oracle(OracleArgs),
    /// Generate a model file and optionally a sampled dataset.
    Synth(SynthArgs),
    /// Check independence axioms on an exact model.
    Axioms(AxiomsArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TestArg {
    #[value(name = "fisher-z")]
    FisherZ,
    #[value(name = "g2")]
    G2,
    Oracle,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    EdgeExclusion,
    Iamb,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FixtureArg {
    Selection,
    XorOr,
    CgCounterexample,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Gaussian,
    Discrete,
}

/// Where the variables come from and how they are tested.
#[derive(Args, Debug, Clone)]
pub struct InputArgs {
    /// Dataset CSV with a header row.
    #[arg(long, conflicts_with = "model", required_unless_present = "model")]
    pub data: Option<PathBuf>,
    /// Model file (JSON).
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Extra NAME=VALUE selection applied to the model after load.
    #[arg(long = "condition", value_name = "NAME=VALUE", requires = "model")]
    pub conditions: Vec<String>,
    /// Independence test; defaults to fisher-z for data and oracle for models.
    #[arg(long)]
    pub test: Option<TestArg>,
    /// Shorthand for `--test oracle`.
    #[arg(long, conflicts_with = "test")]
    pub oracle: bool,
    /// Significance level of data tests.
    #[arg(long, default_value_t = 0.01)]
    pub alpha: f64,
    /// Columns forced categorical, comma-separated.
    #[arg(long, value_name = "NAMES")]
    pub categorical: Option<String>,
    /// Columns forced continuous, comma-separated.
    #[arg(long, value_name = "NAMES")]
    pub continuous: Option<String>,
    /// Model file whose `column_kinds` declare the dataset's column kinds.
    #[arg(long, value_name = "MODEL", requires = "data")]
    pub schema: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    /// Report path; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Seed for randomized steps, echoed in the report.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Include wall-clock timing in the report (makes output run-dependent).
    #[arg(long)]
    pub timing: bool,
}

#[derive(Args, Debug)]
pub struct RelevantArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, value_name = "NAMES")]
    pub targets: String,
    #[arg(long, value_name = "NAMES", default_value = "")]
    pub context: String,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct PurgeArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, value_name = "NAMES")]
    pub targets: String,
    #[arg(long, value_name = "NAMES")]
    pub context: String,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct UgArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, value_enum, default_value = "edge-exclusion")]
    pub method: MethodArg,
    /// Also report the nodes connected to these targets.
    #[arg(long, value_name = "NAMES")]
    pub targets: Option<String>,
    /// Graphviz output path.
    #[arg(long)]
    pub dot: Option<PathBuf>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct OracleArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long = "condition", value_name = "NAME=VALUE")]
    pub conditions: Vec<String>,
    #[arg(long, value_name = "NAMES")]
    pub targets: String,
    #[arg(long, value_name = "NAMES", default_value = "")]
    pub context: String,
    /// Also run the frontier search and report whether both agree.
    #[arg(long)]
    pub compare: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct SynthArgs {
    /// Named model instead of a random one.
    #[arg(long, value_enum, conflicts_with_all = ["nodes", "edge_prob", "kind", "cardinality"])]
    pub fixture: Option<FixtureArg>,
    #[arg(long, default_value_t = 8)]
    pub nodes: usize,
    #[arg(long, default_value_t = 0.25)]
    pub edge_prob: f64,
    #[arg(long, value_enum, default_value = "gaussian")]
    pub kind: KindArg,
    /// States per variable of random discrete models.
    #[arg(long, default_value_t = 2)]
    pub cardinality: usize,
    #[arg(long)]
    pub out_model: Option<PathBuf>,
    /// Number of rows to sample into --out-data.
    #[arg(long, requires = "out_data")]
    pub samples: Option<usize>,
    #[arg(long, requires = "samples")]
    pub out_data: Option<PathBuf>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct AxiomsArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long = "condition", value_name = "NAME=VALUE")]
    pub conditions: Vec<String>,
    /// Variables marginalized out before conditioning.
    #[arg(long, value_name = "NAMES", default_value = "")]
    pub hide: String,
    /// Axioms to check, comma-separated; all when absent.
    #[arg(long, value_name = "LIST")]
    pub check: Option<String>,
    #[arg(long, default_value_t = 2)]
    pub max_set_size: usize,
    /// Verify that hiding and conditioning preserve composition and weak
    /// transitivity instead of checking the derived model directly.
    #[arg(long)]
    pub closure: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}
