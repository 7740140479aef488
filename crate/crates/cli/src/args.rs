use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "gatepower", version, about = "Entanglement and coherence generating power of two-qubit gates")]
pub struct Cli {
    /// key=value file supplying defaults for any long flag
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Resource powers of one gate, or of every named gate with `--gate all`
    GateReport(GateReportArgs),
    /// Parameter scans: S̃ landscapes, kernel regions, maximal-entangler coherence
    Scan(ScanArgs),
    /// Haar-random campaign producing a 2-D histogram and raw samples
    Campaign(CampaignArgs),
    /// Beta fit of a histogram cross-section
    Fit(FitArgs),
    /// Scatter data and re-binned histograms from a stored campaign
    Export(ExportArgs),
}

#[derive(Debug, Args, Clone, Default)]
pub struct GateArgs {
    /// Named gate (cnot, cz, swap, sqrtswap, yx, hh, hi)
    #[arg(long)]
    pub gate: Option<String>,
    /// 16 row-major complex entries as 32 numbers "re im re im ..."
    #[arg(long, allow_hyphen_values = true)]
    pub matrix: Option<String>,
    /// Kernel coefficients, optionally followed by local angles (3, 9 or 15 numbers)
    #[arg(long, allow_hyphen_values = true)]
    pub cartan: Option<String>,
}

#[derive(Debug, Args, Clone, Default)]
pub struct BudgetArgs {
    /// Global evaluations for each product-basis search
    #[arg(long)]
    pub product_budget: Option<usize>,
    /// Global evaluations for the arbitrary-basis search
    #[arg(long)]
    pub arbitrary_budget: Option<usize>,
    /// Global evaluations for product-input searches
    #[arg(long)]
    pub input_budget: Option<usize>,
    /// Local refinements per search
    #[arg(long)]
    pub restarts: Option<usize>,
}

#[derive(Debug, Args)]
pub struct GateReportArgs {
    #[command(flatten)]
    pub gate: GateArgs,
    #[command(flatten)]
    pub budgets: BudgetArgs,
    /// Directory for report.json and manifest.json
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScanKind {
    StildeSurface,
    AlphaRegion,
    MaxEntCoherence,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[arg(long, value_enum)]
    pub kind: ScanKind,
    #[command(flatten)]
    pub gate: GateArgs,
    /// Grid points per axis
    #[arg(long)]
    pub resolution: Option<usize>,
    /// Number of sampled gates (max-ent-coherence)
    #[arg(long)]
    pub samples: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Use identity local gates instead of random ones (alpha-region)
    #[arg(long)]
    pub identity_locals: bool,
    #[command(flatten)]
    pub budgets: BudgetArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CampaignArgs {
    #[arg(long)]
    pub samples: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub bin_width: Option<f64>,
    /// product | arbitrary | l1
    #[arg(long)]
    pub coherence_mode: Option<String>,
    /// closed | numeric | vidal
    #[arg(long)]
    pub ent_mode: Option<String>,
    #[arg(long)]
    pub workers: Option<usize>,
    #[command(flatten)]
    pub budgets: BudgetArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AxisArg {
    Ent,
    Coh,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Campaign directory or histogram CSV
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Fit a noiseless curve generated from "alpha,beta,d,x0,h" instead
    #[arg(long, allow_hyphen_values = true)]
    pub synthetic: Option<String>,
    /// Axis held fixed by the section
    #[arg(long, value_enum, default_value = "ent")]
    pub axis: AxisArg,
    /// Fixed bin index (default: top bin)
    #[arg(long)]
    pub bin: Option<usize>,
    /// Initial guess "alpha,beta,d,x0,h"
    #[arg(long, allow_hyphen_values = true)]
    pub init: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PairArg {
    EntProduct,
    EntArbitrary,
    VidalL1,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    /// Campaign directory or samples CSV
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub pair: Option<PairArg>,
    /// Also write the histogram at this bin width
    #[arg(long)]
    pub bin_width: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}
