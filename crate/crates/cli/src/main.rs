// `!(x > 0.0)` is used on purpose so that NaN fails positivity checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

/// Static and homologous self-gravitating elastic balls.
#[derive(Parser, Debug)]
#[command(name = "polyball", version, propagate_version = true)]
struct Cli {
    /// JSON object of options (or a previous run's manifest); flags override it.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate the constitutive functions at one strain state.
    Eval(EvalArgs),
    /// Run the constitutive identity and inequality checks for a material.
    Check(CheckArgs),
    /// Integrate a static ball from its center.
    Static(StaticArgs),
    /// Homologous (self-similar) expanding or collapsing ball.
    Homologous(HomologousArgs),
    /// Phase-plane analysis: fixed points and the orbit Γ.
    Phase(PhaseArgs),
    /// Parameter-plane scans.
    #[command(subcommand)]
    Scan(ScanCommand),
}

#[derive(Subcommand, Debug)]
enum ScanCommand {
    /// (γ, β) existence region at fixed ν, with a γ⋆ estimate.
    Static(ScanStaticArgs),
    /// Zero-boundary-shear threshold γ⋆ over a range of ν.
    Gammastar(ScanGammaStarArgs),
    /// Homologous collapse threshold δ⋆(α, ν).
    Homologous(ScanHomologousArgs),
    /// Constitutive-inequality raster on a (δ, η) window or the (γ, β) plane.
    Raster(ScanRasterArgs),
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, Default)]
pub struct MaterialArgs {
    /// Poisson ratio ν ∈ (−1, 1/2] [default: 0.25]
    #[arg(long, allow_negative_numbers = true)]
    pub nu: Option<f64>,
    /// Polytropic exponent γ > 0
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Shear exponent β ≠ 0, β ≤ 3γ(1−ν)/(1+ν)
    #[arg(long, allow_negative_numbers = true)]
    pub beta: Option<f64>,
    /// Bulk modulus κ [default: 1]
    #[arg(long)]
    pub kappa: Option<f64>,
    /// Gravity coupling θ [default: 1]
    #[arg(long)]
    pub theta: Option<f64>,
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, Default)]
pub struct OutArgs {
    /// Output directory [default: polyball-out]
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, Default)]
pub struct EvalArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub material: MaterialArgs,
    /// Density δ > 0
    #[arg(long)]
    pub delta: Option<f64>,
    /// Mean density η > 0
    #[arg(long)]
    pub eta: Option<f64>,
    /// Print JSON instead of a table
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub json: Option<bool>,
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, Default)]
pub struct CheckArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub material: MaterialArgs,
    /// Seed for the sampled checks [default: 0]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of sampled strain states [default: 1000]
    #[arg(long)]
    pub samples: Option<usize>,
    #[command(flatten)]
    #[serde(flatten)]
    pub out: OutArgs,
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, Default)]
pub struct SolverArgs {
    /// Relative tolerance [default: 1e-10]
    #[arg(long)]
    pub rtol: Option<f64>,
    /// Absolute tolerance [default: 1e-10]
    #[arg(long)]
    pub atol: Option<f64>,
    /// Existence horizon in rescaled radius [default: 1e3]
    #[arg(long)]
    pub r_max: Option<f64>,
    /// Classification horizon in rescaled radius [default: 1e12]
    #[arg(long)]
    pub classify_r_max: Option<f64>,
    /// Wall-clock budget per integration, seconds
    #[arg(long)]
    pub timeout: Option<f64>,
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, Default)]
pub struct StaticArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub material: MaterialArgs,
    /// Central density δ_c [default: 1]
    #[arg(long)]
    pub delta_c: Option<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub solver: SolverArgs,
    /// Also write the Lagrangian deformation map
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub lagrangian: Option<bool>,
    #[command(flatten)]
    #[serde(flatten)]
    pub out: OutArgs,
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, Default)]
pub struct HomologousArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub material: MaterialArgs,
    /// Energy constant α ≠ 0 (α > 0 expands, α < 0 collapses)
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    /// Initial central density δ₀ᶜ [default: 1]
    #[arg(long)]
    pub delta0_c: Option<f64>,
    /// End time for ω(t) [default: 10]
    #[arg(long)]
    pub t_end: Option<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub out: OutArgs,
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, Default)]
pub struct PhaseArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub material: MaterialArgs,
    /// Orbit parameter C > 0 [default: 1]
    #[arg(long)]
    pub c: Option<f64>,
    /// End of the orbit in ξ = ln r [default: 40]
    #[arg(long, allow_negative_numbers = true)]
    pub xi_end: Option<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub out: OutArgs,
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, Default)]
pub struct WorkerArgs {
    /// Worker threads [default: $POLYBALL_WORKERS, else available cores]
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, Default)]
pub struct ScanStaticArgs {
    /// Poisson ratio ν [default: 0.25]
    #[arg(long, allow_negative_numbers = true)]
    pub nu: Option<f64>,
    /// [default: 0.05]
    #[arg(long)]
    pub gamma_min: Option<f64>,
    /// [default: 3]
    #[arg(long)]
    pub gamma_max: Option<f64>,
    /// [default: -2]
    #[arg(long, allow_negative_numbers = true)]
    pub beta_min: Option<f64>,
    /// [default: 4]
    #[arg(long, allow_negative_numbers = true)]
    pub beta_max: Option<f64>,
    /// γ resolution [default: 100]
    #[arg(long)]
    pub nx: Option<usize>,
    /// β resolution [default: 100]
    #[arg(long)]
    pub ny: Option<usize>,
    /// Central density δ_c [default: 1]
    #[arg(long)]
    pub delta_c: Option<f64>,
    /// Per-cell wall-clock budget, seconds [default: 10]
    #[arg(long)]
    pub cell_timeout: Option<f64>,
    /// Also write a PGM raster
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub pgm: Option<bool>,
    #[command(flatten)]
    #[serde(flatten)]
    pub workers: WorkerArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub out: OutArgs,
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, Default)]
pub struct ScanGammaStarArgs {
    /// [default: -0.9]
    #[arg(long, allow_negative_numbers = true)]
    pub nu_min: Option<f64>,
    /// [default: 0.499]
    #[arg(long, allow_negative_numbers = true)]
    pub nu_max: Option<f64>,
    /// Number of ν samples [default: 20]
    #[arg(long)]
    pub n: Option<usize>,
    /// [default: 0.01]
    #[arg(long)]
    pub gamma_min: Option<f64>,
    /// [default: 2]
    #[arg(long)]
    pub gamma_max: Option<f64>,
    /// Zero-shear samples before bisection [default: 100]
    #[arg(long)]
    pub samples: Option<usize>,
    #[command(flatten)]
    #[serde(flatten)]
    pub workers: WorkerArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub out: OutArgs,
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, Default)]
pub struct ScanHomologousArgs {
    /// Comma-separated Poisson ratios [default: 0,0.25,0.45]
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub nus: Option<Vec<f64>>,
    /// [default: -4]
    #[arg(long, allow_negative_numbers = true)]
    pub alpha_min: Option<f64>,
    /// [default: -0.25]
    #[arg(long, allow_negative_numbers = true)]
    pub alpha_max: Option<f64>,
    /// Number of α samples [default: 5]
    #[arg(long)]
    pub n: Option<usize>,
    #[command(flatten)]
    #[serde(flatten)]
    pub workers: WorkerArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub out: OutArgs,
}

#[derive(ValueEnum, Serialize, Deserialize, Debug, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    Polytropic,
    Svk,
}

#[derive(ValueEnum, Serialize, Deserialize, Debug, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum PredicateKind {
    Hyperbolicity,
    BakerEricksen,
    /// Sampled strong Baker–Ericksen verdict over (γ, β) against its closed form
    StrongBePlane,
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, Default)]
pub struct ScanRasterArgs {
    /// [default: svk]
    #[arg(long, value_enum)]
    pub model: Option<ModelKind>,
    /// [default: hyperbolicity]
    #[arg(long, value_enum)]
    pub predicate: Option<PredicateKind>,
    #[command(flatten)]
    #[serde(flatten)]
    pub material: MaterialArgs,
    /// Window: δ (or γ) lower bound [default: 0.1]
    #[arg(long, allow_negative_numbers = true)]
    pub x_min: Option<f64>,
    /// [default: 3]
    #[arg(long, allow_negative_numbers = true)]
    pub x_max: Option<f64>,
    /// Window: η (or β) lower bound [default: 0.1]
    #[arg(long, allow_negative_numbers = true)]
    pub y_min: Option<f64>,
    /// [default: 3]
    #[arg(long, allow_negative_numbers = true)]
    pub y_max: Option<f64>,
    /// [default: 200]
    #[arg(long)]
    pub nx: Option<usize>,
    /// [default: 200]
    #[arg(long)]
    pub ny: Option<usize>,
    /// Also write a PGM raster
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub pgm: Option<bool>,
    #[command(flatten)]
    #[serde(flatten)]
    pub workers: WorkerArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub out: OutArgs,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(commands::exit_code(&e))
        }
    }
}
