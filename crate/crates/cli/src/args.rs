use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "plgnet", version, about = "Learn sparse binary pairwise Markov networks")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GlobalArgs {
    /// Base seed; every random stream of the run is derived from it.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Worker threads for NLR nodes and StARS subsamples.
    #[arg(long, global = true, default_value_t = 1)]
    pub threads: usize,

    /// Directory for all outputs, created if missing.
    #[arg(long, global = true, default_value = ".")]
    #[serde(skip)]
    pub output_dir: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw a random network and Gibbs samples from it.
    Simulate(SimulateArgs),
    /// Fit a network to binary samples.
    Fit(FitArgs),
    /// Choose the penalty level by StARS.
    Select(SelectArgs),
    /// Score an estimate against a known network.
    Roc(RocArgs),
    /// Time the estimators on simulated networks.
    Bench(BenchArgs),
}

/// `s=v` with a 1-based vertex.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiagOverride {
    pub vertex: usize,
    pub value: f64,
}

fn parse_diag(text: &str) -> Result<DiagOverride, String> {
    let (s, v) = text.split_once('=').ok_or_else(|| format!("expected s=value, got {text:?}"))?;
    let vertex: usize = s.trim().parse().map_err(|_| format!("bad vertex {s:?}"))?;
    if vertex == 0 {
        return Err("vertices are numbered from 1".into());
    }
    let value: f64 = v.trim().parse().map_err(|_| format!("bad value {v:?}"))?;
    if !value.is_finite() {
        return Err(format!("value must be finite, got {v:?}"));
    }
    Ok(DiagOverride { vertex, value })
}

/// `count,ratio`
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AutoGrid {
    pub count: usize,
    pub ratio: f64,
}

fn parse_auto_grid(text: &str) -> Result<AutoGrid, String> {
    let (k, r) = text.split_once(',').ok_or_else(|| format!("expected count,ratio, got {text:?}"))?;
    let count: usize = k.trim().parse().map_err(|_| format!("bad count {k:?}"))?;
    let ratio: f64 = r.trim().parse().map_err(|_| format!("bad ratio {r:?}"))?;
    if count == 0 || !(ratio > 0.0 && ratio < 1.0) {
        return Err("need count >= 1 and 0 < ratio < 1".into());
    }
    Ok(AutoGrid { count, ratio })
}

fn parse_positive(text: &str) -> Result<f64, String> {
    match text.trim().parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("expected a positive number, got {text:?}")),
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SimulateArgs {
    #[arg(long)]
    pub p: usize,
    #[arg(long, default_value_t = 0.3)]
    pub edge_prob: f64,
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    #[arg(long, default_value_t = 1000)]
    pub burn_in: usize,
    #[arg(long, default_value_t = 1)]
    pub thinning: usize,
    /// Fixed node potential, e.g. `--diag 1=5` (repeatable).
    #[arg(long, value_parser = parse_diag)]
    pub diag: Vec<DiagOverride>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodArg {
    Plg,
    Nlr,
    Direct,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ScreeningArg {
    Strong,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SymmetrizeArg {
    Mean,
    And,
    Or,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SolverArgs {
    #[arg(long, default_value_t = 1e-7)]
    pub tol: f64,
    #[arg(long, default_value_t = 1e-6)]
    pub kkt_tol: f64,
    #[arg(long, default_value_t = 100)]
    pub max_outer: usize,
    #[arg(long, default_value_t = 10_000)]
    pub max_inner: usize,
    #[arg(long, value_enum, default_value_t = ScreeningArg::Strong)]
    pub screening: ScreeningArg,
    /// Proximal-gradient mapping tolerance of the direct optimizer.
    #[arg(long, default_value_t = 1e-7)]
    pub direct_tol: f64,
    #[arg(long, default_value_t = 50_000)]
    pub direct_max_iter: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct InputArgs {
    /// Headerless CSV of 0/1 observations.
    #[arg(long)]
    pub input: PathBuf,
    /// Replace entries other than 0/1 with 0 instead of failing.
    #[arg(long)]
    pub impute_zero: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FitArgs {
    #[command(flatten)]
    pub data: InputArgs,
    #[arg(long, value_enum, default_value_t = MethodArg::Plg)]
    pub method: MethodArg,
    /// Penalty levels on the pseudo-likelihood scale; NLR fits each at half
    /// the value.
    #[arg(long, value_delimiter = ',', value_parser = parse_positive, conflicts_with = "auto_grid")]
    pub lambda: Vec<f64>,
    /// Log-spaced grid from the method's λ_max: `count,ratio`.
    #[arg(long, value_parser = parse_auto_grid)]
    pub auto_grid: Option<AutoGrid>,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long, value_enum, default_value_t = SymmetrizeArg::Mean)]
    pub symmetrize: SymmetrizeArg,
    /// Keep only positive weights in the edge lists.
    #[arg(long)]
    pub positive_only: bool,
    /// Also write the stacked design as 1-based COO triplets.
    #[arg(long)]
    pub export_design: bool,
    /// Refuse to export designs with more nonzeros than this.
    #[arg(long, default_value_t = 50_000_000)]
    pub design_max_entries: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SelectArgs {
    #[command(flatten)]
    pub data: InputArgs,
    /// `plg` reports the NLR value by halving; `nlr` runs StARS on node
    /// regressions directly (node scale).
    #[arg(long, value_enum, default_value_t = MethodArg::Plg)]
    pub method: MethodArg,
    #[arg(long, default_value_t = 20)]
    pub subsamples: usize,
    /// Defaults to floor(10 √N).
    #[arg(long)]
    pub subsample_size: Option<usize>,
    #[arg(long, default_value_t = 0.05)]
    pub beta: f64,
    #[arg(long, value_delimiter = ',', value_parser = parse_positive, conflicts_with = "auto_grid")]
    pub lambda: Vec<f64>,
    #[arg(long, value_parser = parse_auto_grid)]
    pub auto_grid: Option<AutoGrid>,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long, value_enum, default_value_t = SymmetrizeArg::Mean)]
    pub symmetrize: SymmetrizeArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RocMode {
    /// Rank pairs by estimated magnitude at each penalty level.
    PerLambda,
    /// Rank pairs by the largest penalty at which they enter the path.
    Path,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct RocArgs {
    /// True network (parameter JSON).
    #[arg(long)]
    pub truth: PathBuf,
    /// Parameter JSON or coefficients JSON from `fit`.
    #[arg(long)]
    pub estimate: PathBuf,
    #[arg(long, value_enum, default_value_t = RocMode::PerLambda)]
    pub mode: RocMode,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BenchArgs {
    #[arg(long, value_delimiter = ',', default_value = "10")]
    pub p: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "0.3")]
    pub edge_prob: Vec<f64>,
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    #[arg(long, default_value_t = 1000)]
    pub burn_in: usize,
    #[arg(long, default_value_t = 1)]
    pub trials: usize,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "plg,nlr")]
    pub methods: Vec<MethodArg>,
    /// Penalty levels on the pseudo-likelihood scale; NLR runs at half.
    #[arg(long, value_delimiter = ',', value_parser = parse_positive, required = true)]
    pub lambda: Vec<f64>,
    #[arg(long, default_value_t = 5)]
    pub repeats: usize,
    #[arg(long, value_parser = parse_diag)]
    pub diag: Vec<DiagOverride>,
    #[command(flatten)]
    pub solver: SolverArgs,
}
