use std::path::PathBuf;

use clap::{ArgAction, Args, Parser, Subcommand, ValueEnum};
use rae_core::Connectivity;

#[derive(Debug, Parser)]
#[command(
    name = "raest",
    version,
    about = "Runtime estimates for amplitude estimation versus standard sampling"
)]
pub struct Cli {
    /// JSON file whose keys supply any flag of the chosen subcommand
    /// (`{"target-rmse": 1e-3, "pis": [0, 0.3]}`); command-line flags win.
    // Consumed before parsing; declared here for --help.
    #[allow(dead_code)]
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
#[command(args_override_self = true)]
pub enum Command {
    /// Simulate adaptive estimation trials and write the trimmed-MSE curve.
    Simulate(SimulateArgs),
    /// Compare simulated layer costs with the closed-form runtime model.
    ValidateModel(ValidateArgs),
    /// Split an energy accuracy target across Hamiltonian terms.
    Allocate(AllocateArgs),
    /// Runtimes of both methods at one code distance.
    Estimate(EstimateArgs),
    /// Runtimes of both methods over a range of code distances.
    Sweep(SweepArgs),
    /// Fit y = a·N^b + c to (N, y) points.
    Fit(FitArgs),
    /// Optimal-distance runtime predictions for Hamiltonian series.
    Report(ReportArgs),
    /// Write a random Hamiltonian.
    Synthesize(SynthesizeArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum HamiltonianFormat {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConnectivityArg {
    #[value(name = "2d")]
    TwoD,
    A2a,
}

impl From<ConnectivityArg> for Connectivity {
    fn from(c: ConnectivityArg) -> Self {
        match c {
            ConnectivityArg::TwoD => Connectivity::TwoDimensional,
            ConnectivityArg::A2a => Connectivity::AllToAll,
        }
    }
}

/// Surface-code and sweep settings shared by the cost commands.
#[derive(Debug, Args)]
pub struct CostArgs {
    /// Target RMSE of the energy estimate in Hartree.
    #[arg(long, default_value_t = 1e-3)]
    pub target_rmse: f64,
    #[arg(long, value_enum, default_value = "a2a")]
    pub connectivity: ConnectivityArg,
    /// Surface-code cycle time in seconds.
    #[arg(long, default_value_t = 1e-6)]
    pub cycle_time: f64,
    /// SPAM contrast of the amplitude-estimation circuits.
    #[arg(long, default_value_t = 1.0)]
    pub p_bar: f64,
    /// Per-layer decay above which the RAE runtime model is not applied.
    #[arg(long, default_value_t = 1.0)]
    pub max_lambda: f64,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// True expectation value Π in [-1, 1].
    #[arg(long, allow_hyphen_values = true)]
    pub pi: f64,
    /// Per-layer fidelity e^{-λ} in (0, 1].
    #[arg(long, conflicts_with = "lambda")]
    pub layer_fidelity: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub p_bar: f64,
    #[arg(long, default_value_t = 50)]
    pub trials: usize,
    #[arg(long, default_value_t = 300)]
    pub steps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Prior standard deviation in θ (radians).
    #[arg(long, default_value_t = 0.01)]
    pub prior_sd: f64,
    /// Standard deviation of the prior-mean offset (radians).
    #[arg(long, default_value_t = 0.01)]
    pub jitter_sd: f64,
    #[arg(long, default_value_t = 2001)]
    pub grid_points: usize,
    /// Restrict the grid to this many prior sds around the prior mean.
    #[arg(long)]
    pub grid_window: Option<f64>,
    /// Upper limit on the layer count chosen per shot.
    #[arg(long, conflicts_with = "fixed_layers")]
    pub max_layers: Option<u32>,
    /// Use this layer count for every shot instead of the adaptive rule.
    #[arg(long)]
    pub fixed_layers: Option<u32>,
    /// Fraction of worst trials dropped at each step.
    #[arg(long, default_value_t = 0.1)]
    pub trim: f64,
    /// Ensemble curve output.
    #[arg(long)]
    pub out: PathBuf,
    /// Per-trial traces (CSV with a leading trial column).
    #[arg(long)]
    pub traces: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(long, value_delimiter = ',', action = ArgAction::Set, allow_hyphen_values = true)]
    pub pis: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', action = ArgAction::Set)]
    pub layer_fidelities: Option<Vec<f64>>,
    #[arg(long, default_value_t = 50)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.01)]
    pub prior_sd: f64,
    #[arg(long, default_value_t = 1.0)]
    pub p_bar: f64,
    #[arg(long, default_value_t = 0.1)]
    pub trim: f64,
    #[arg(long, default_value_t = 2001)]
    pub grid_points: usize,
    /// Grid half-width in prior sds; 0 spans all of [0, π].
    #[arg(long, default_value_t = 10.0)]
    pub grid_window: f64,
    /// Accuracy targets as fractions of the prior sd in Π.
    #[arg(long, value_delimiter = ',', action = ArgAction::Set)]
    pub targets: Option<Vec<f64>>,
    /// Fixed step budget; by default budgets grow until targets are met.
    #[arg(long)]
    pub max_steps: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct AllocateArgs {
    #[arg(long)]
    pub hamiltonian: PathBuf,
    #[arg(long, default_value_t = 1e-3)]
    pub target_rmse: f64,
    /// Per-layer fidelity e^{-λ}; ignored with --distance.
    #[arg(long, conflicts_with_all = ["lambda", "distance"])]
    pub layer_fidelity: Option<f64>,
    #[arg(long, conflicts_with = "distance")]
    pub lambda: Option<f64>,
    /// Seconds per layer; the default reports runtimes in layers.
    #[arg(long, conflicts_with = "distance")]
    pub layer_time: Option<f64>,
    /// Derive λ and the layer time from the cost model at this code distance.
    #[arg(long)]
    pub distance: Option<u32>,
    #[arg(long, value_enum, default_value = "a2a")]
    pub connectivity: ConnectivityArg,
    #[arg(long, default_value_t = 1e-6)]
    pub cycle_time: f64,
    #[arg(long, default_value_t = 1.0)]
    pub p_bar: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[arg(long)]
    pub hamiltonian: PathBuf,
    #[command(flatten)]
    pub cost: CostArgs,
    #[arg(long, required_unless_present = "gate_error", conflicts_with = "gate_error")]
    pub distance: Option<u32>,
    /// Use the smallest distance whose logical gate error is at most this.
    #[arg(long)]
    pub gate_error: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub hamiltonian: PathBuf,
    #[command(flatten)]
    pub cost: CostArgs,
    #[arg(long, default_value_t = 3)]
    pub d_min: u32,
    #[arg(long, default_value_t = 51)]
    pub d_max: u32,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// CSV of `N,y` rows; a non-numeric first row is taken as a header.
    #[arg(long)]
    pub input: PathBuf,
    /// Also evaluate the fit at this qubit count.
    #[arg(long)]
    pub target: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// JSON manifest: `[{"label": .., "hamiltonians": [paths], "target_qubits": N}]`,
    /// with paths relative to the manifest.
    #[arg(long, required_unless_present = "hamiltonian", conflicts_with = "hamiltonian")]
    pub series: Option<PathBuf>,
    /// Hamiltonian files forming a single series.
    #[arg(long, value_delimiter = ',', action = ArgAction::Set)]
    pub hamiltonian: Option<Vec<PathBuf>>,
    #[arg(long, default_value = "series")]
    pub label: String,
    #[arg(long)]
    pub target_qubits: Option<u64>,
    #[command(flatten)]
    pub cost: CostArgs,
    #[arg(long, default_value_t = 3)]
    pub d_min: u32,
    #[arg(long, default_value_t = 51)]
    pub d_max: u32,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct SynthesizeArgs {
    #[arg(long)]
    pub qubits: usize,
    #[arg(long)]
    pub terms: usize,
    /// Coefficients uniform in [-scale, scale].
    #[arg(long, conflicts_with_all = ["log_min", "log_max"])]
    pub scale: Option<f64>,
    /// Magnitudes log-uniform in [log-min, log-max] with random signs.
    #[arg(long, requires = "log_max")]
    pub log_min: Option<f64>,
    #[arg(long, requires = "log_min")]
    pub log_max: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "text")]
    pub format: HamiltonianFormat,
}
