use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "gsnet", version, about = "Fidelity and decay rates of graph states distributed over noisy networks")]
pub struct Cli {
    /// Worker threads; results do not depend on this.
    #[arg(long, global = true, env = "GSNET_THREADS")]
    pub threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write to this file instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<std::path::PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Fidelity of the distributed graph state.
    Fidelity(FidelityArgs),
    /// Decay rate per node and per unit β.
    Decay(FidelityArgs),
    /// Mean-field decay rate.
    MeanField(GraphArgs),
    /// Ring fidelity by transfer matrices.
    Transfer(RingArgs),
    /// Ring fidelity from generating functions.
    Genfunc(GenfuncArgs),
    /// Purified star correlator table.
    Purify(PurifyArgs),
    /// Largest local noise that purification tolerates.
    Threshold(ThresholdArgs),
    /// Quenched average over random networks.
    Ensemble(EnsembleArgs),
    /// Mean degree where two protocols swap order.
    Crossover(CrossoverArgs),
    /// Compares closed-form correlators with the gate-level simulation.
    OracleCheck(OracleArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProtocolArg {
    BipartiteA,
    BipartiteB,
    Subgraph,
    /// Ring, every node sends one leaf forward.
    S1,
    /// Even ring, even nodes send leaves both ways.
    S2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NetworkProtocol {
    BipartiteA,
    BipartiteB,
    Subgraph,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RingArg {
    BipartiteA,
    BipartiteB,
    S1,
    S2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PurificationArg {
    Ideal,
    FirstOrder,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SemanticsArg {
    Or,
    ExactXor,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LeafRuleArg {
    Physical,
    Literal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrderArg {
    Canonical,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodArg {
    /// Exact below the enumeration limit, Monte Carlo above.
    Auto,
    Exact,
    Transfer,
    Genfunc,
    Mc,
    MeanField,
    FirstOrder,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FormArg {
    Equation,
    Text,
    RandomOrder,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CriterionArg {
    FidelityAboveHalf,
    ImprovesOnInput,
}

/// Noise rates. `--p` sets `p1 = p2 = p` unless they are given separately and
/// accepts a sweep: a comma list or `start:stop:count`.
#[derive(Debug, Clone, Args, Serialize)]
pub struct NoiseArgs {
    #[arg(long, default_value = "0")]
    pub p: String,
    #[arg(long)]
    pub p1: Option<f64>,
    #[arg(long)]
    pub p2: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    pub pc: f64,
    #[arg(long, value_enum, default_value_t = SemanticsArg::Or)]
    pub semantics: SemanticsArg,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GraphArgs {
    /// `ring:N`, `er:N:MEAN_DEGREE` or an edge-list file.
    #[arg(long)]
    pub graph: String,
    #[arg(long, value_enum)]
    pub protocol: ProtocolArg,
    /// Arc file for the subgraph protocol; random orientation otherwise.
    #[arg(long)]
    pub orientation: Option<std::path::PathBuf>,
    #[arg(long, value_enum, default_value_t = OrderArg::Canonical)]
    pub edge_order: OrderArg,
    #[arg(long, value_enum, default_value_t = PurificationArg::FirstOrder)]
    pub purification: PurificationArg,
    #[arg(long, value_enum, default_value_t = LeafRuleArg::Physical)]
    pub leaf_rule: LeafRuleArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub noise: NoiseArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FidelityArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
    pub method: MethodArg,
    #[arg(long, default_value_t = 10_000)]
    pub samples: u64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct RingArgs {
    #[arg(long, value_enum)]
    pub protocol: RingArg,
    /// Ring sizes, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub n: Vec<usize>,
    #[arg(long, value_enum, default_value_t = PurificationArg::FirstOrder)]
    pub purification: PurificationArg,
    #[command(flatten)]
    pub noise: NoiseArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GenfuncArgs {
    #[command(flatten)]
    pub ring: RingArgs,
    /// Also enumerate all configurations and report the difference.
    #[arg(long)]
    pub exact: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PurifyArgs {
    #[arg(long)]
    pub j: usize,
    /// Local gate and measurement noise.
    #[arg(long)]
    pub p: f64,
    #[arg(long)]
    pub p1: Option<f64>,
    #[arg(long)]
    pub p2: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    pub pc: f64,
    /// Closed first-order table instead of iterating rounds.
    #[arg(long)]
    pub first_order: bool,
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    #[arg(long, default_value_t = 10_000)]
    pub max_iter: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ThresholdArgs {
    /// Leaf counts, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub j: Vec<usize>,
    #[arg(long, default_value_t = 0.1)]
    pub pc: f64,
    #[arg(long, value_enum, default_value_t = CriterionArg::FidelityAboveHalf)]
    pub criterion: CriterionArg,
    #[arg(long, default_value_t = 1e-4)]
    pub tol: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EnsembleArgs {
    /// `poisson:MEAN` or a JSON degree law.
    #[arg(long)]
    pub dist: String,
    #[arg(long, value_enum)]
    pub protocol: NetworkProtocol,
    #[arg(long)]
    pub p: f64,
    #[arg(long, default_value_t = 10)]
    pub graphs: u64,
    #[arg(long, default_value_t = 100)]
    pub nodes: usize,
    #[arg(long, default_value_t = 1000)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = FormArg::Equation)]
    pub form: FormArg,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CrossoverArgs {
    #[arg(long, value_enum)]
    pub a: NetworkProtocol,
    #[arg(long, value_enum)]
    pub b: NetworkProtocol,
    #[arg(long, value_enum, default_value_t = FormArg::Equation)]
    pub form: FormArg,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct OracleArgs {
    #[arg(long)]
    pub graph: String,
    #[arg(long, value_enum)]
    pub protocol: ProtocolArg,
    #[arg(long)]
    pub orientation: Option<std::path::PathBuf>,
    #[arg(long, value_enum, default_value_t = OrderArg::Canonical)]
    pub edge_order: OrderArg,
    #[arg(long, value_enum, default_value_t = PurificationArg::FirstOrder)]
    pub purification: PurificationArg,
    #[arg(long, value_enum, default_value_t = LeafRuleArg::Physical)]
    pub leaf_rule: LeafRuleArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.013)]
    pub p1: f64,
    #[arg(long, default_value_t = 0.029)]
    pub p2: f64,
    /// Noise of the first-order purified tables.
    #[arg(long, default_value_t = 0.021)]
    pub p: f64,
    #[arg(long, value_enum, default_value_t = SemanticsArg::Or)]
    pub semantics: SemanticsArg,
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    /// Refuse graphs with more nodes than this.
    #[arg(long, default_value_t = 12)]
    pub n_max: usize,
}
