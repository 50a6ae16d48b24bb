//! `twolevel`: simulate, design and shape population transfer in a driven
//! two-level atom (hydrogen 2s–2p by default).
//!
//! Exit codes: 0 on success, 2 for invalid arguments, 3 for failures while
//! running (integration blow-up, unreachable thresholds, I/O).

mod commands;
mod manifest;
mod quantity;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "twolevel", version, about = "Population transfer in a driven two-level atom")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Integrate the amplitude equations and write the trajectory as CSV.
    Simulate(SimulateArgs),
    /// Field frequency for a requested flat-top duration and leakage budget.
    Design(DesignArgs),
    /// Search odd-harmonic pulse shapes for a longer populated window.
    Optimize(OptimizeArgs),
    /// Hydrogen 2s–2p constants.
    Info,
    /// Re-run the command recorded in a manifest.
    Replay {
        manifest: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Level splitting ω₂₁ (a.u., or with an `ev` suffix). Defaults to the hydrogen Lamb shift.
    #[arg(long, value_parser = quantity::frequency)]
    pub omega21: Option<f64>,
    /// Field frequency ω (a.u., `ev`, or a wavelength in `um`/`cm`).
    #[arg(long, value_parser = quantity::frequency, conflicts_with = "ratio")]
    pub omega: Option<f64>,
    /// Field frequency as a multiple of ω₂₁.
    #[arg(long)]
    pub ratio: Option<f64>,
    /// Rabi frequency χ (a.u.). Defaults to the complete-transfer value πω/2.
    #[arg(long, value_parser = quantity::frequency)]
    pub chi: Option<f64>,
    /// Pulse given as JSON (`{"type": "cosine" | "harmonic_sum" | "gaussian", ...}`).
    #[arg(long, conflicts_with_all = ["chi", "omega", "ratio"])]
    pub pulse: Option<PathBuf>,
    /// Integration span in units of the pulse's grid scale (field period, or Gaussian width).
    #[arg(long, default_value_t = 1.0)]
    pub periods: f64,
    /// Explicit end time in a.u.; overrides `--periods`.
    #[arg(long, value_parser = quantity::atomic)]
    pub t_end: Option<f64>,
    #[arg(long, default_value_t = twolevel::integrator::DEFAULT_STEPS_PER_SCALE)]
    pub steps_per_period: u32,
    /// Fixed step in a.u.; overrides `--steps-per-period`.
    #[arg(long, value_parser = quantity::atomic)]
    pub step: Option<f64>,
    /// Append degenerate-limit reference columns `P1_analytic,P2_analytic`.
    #[arg(long)]
    pub analytic: bool,
    /// Run several frequency ratios concurrently; one CSV per ratio.
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["ratio", "omega", "pulse"])]
    pub sweep: Option<Vec<f64>>,
    #[arg(long, short, default_value = "trajectory.csv")]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct DesignArgs {
    /// Requested full duration T_s of the populated window (a.u.).
    #[arg(long, value_parser = quantity::atomic)]
    pub ts: f64,
    /// Leakage budget P_cr in (0, 1).
    #[arg(long)]
    pub pcr: f64,
    /// Splitting used by `--verify` (a.u. or `ev`). Defaults to the hydrogen Lamb shift.
    #[arg(long, value_parser = quantity::frequency)]
    pub omega21: Option<f64>,
    /// Integrate the designed drive and report the measured window.
    #[arg(long)]
    pub verify: bool,
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    /// Base field frequency (a.u., `ev`, `um`, `cm`).
    #[arg(long, value_parser = quantity::frequency, default_value = "1")]
    pub omega: f64,
    /// Level splitting used in the fitness runs.
    #[arg(long, value_parser = quantity::frequency, default_value = "0")]
    pub omega21: f64,
    #[arg(long, default_value_t = 1e-4)]
    pub pcr: f64,
    /// Field periods simulated per fitness evaluation.
    #[arg(long, default_value_t = 1)]
    pub horizon: u32,
    #[arg(long, default_value_t = 24)]
    pub population: usize,
    #[arg(long, default_value_t = 40)]
    pub generations: usize,
    #[arg(long, default_value_t = 0.1)]
    pub mutation_scale: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 3)]
    pub n_harmonics: usize,
    /// Directory for pulse.json, history.csv, summary.json and manifest.json.
    #[arg(long, short, default_value = "optimize-out")]
    pub output: PathBuf,
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Simulate(args) => commands::simulate(&args, &argv),
        Command::Design(args) => commands::design(&args),
        Command::Optimize(args) => commands::optimize(&args, &argv),
        Command::Info => commands::info(),
        Command::Replay { manifest } => commands::replay(&manifest),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
