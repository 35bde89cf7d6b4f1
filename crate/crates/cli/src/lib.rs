//! Command-line front end for `qecmetro`.
//!
//! Every command takes its parameters from an optional TOML file (`--config`)
//! and from flags; flags win. Results go to the output directory as CSV
//! and/or JSON, written atomically.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qecmetro::Execution;

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod plot;

use commands::Context;
use config::{
    CodeName, CodesConfig, Format, MPolicyName, ModeName, NoiseName, OptimizeConfig, QfiConfig, QfiModel, RunConfig,
    ScenarioConfig, ScenarioKindName, SweepConfig, SweepModeName, VerifyConfig,
};
pub use error::{CliError, Result};
use output::{resolve_out_dir, OutputDir};

#[derive(Debug, Parser)]
#[command(name = "qecmetro", version, about = "Precision limits of error-corrected quantum metrology")]
pub struct Cli {
    /// TOML run configuration; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory (default: $QECMETRO_OUT_DIR, then ./qecmetro-out).
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Run data-parallel loops on one thread.
    #[arg(long, global = true)]
    pub sequential: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// GHZ QFI under dephasing or depolarizing noise, closed form and spectral.
    Qfi(QfiArgs),
    /// Scaling sweep of δλ√T over N.
    Sweep(SweepArgs),
    /// Optimal interrogation time for a repetition-coded GHZ probe.
    OptimizeTime(OptimizeArgs),
    /// Logical retention tables for the repetition and five-qubit codes.
    Codes(CodesArgs),
    /// Run the oracle cross-check suite.
    Verify(VerifyArgs),
    /// Run one density-matrix scenario pipeline.
    Scenario(ScenarioArgs),
}

#[derive(Debug, Args)]
pub struct QfiArgs {
    #[arg(long, value_enum)]
    pub model: Option<QfiModel>,
    #[arg(long = "N", alias = "n")]
    pub n: Option<u64>,
    #[arg(long)]
    pub p: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Explicit comma-separated N grid.
    #[arg(long, value_delimiter = ',')]
    pub n_values: Option<Vec<u64>>,
    #[arg(long)]
    pub n_min: Option<u64>,
    #[arg(long)]
    pub n_max: Option<u64>,
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long, value_enum)]
    pub m_policy: Option<MPolicyName>,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long, value_enum)]
    pub mode: Option<SweepModeName>,
    #[arg(long)]
    pub p: Option<f64>,
    /// Also write sweep.svg.
    #[arg(long)]
    pub plot: bool,
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long = "N", alias = "n")]
    pub n: Option<u64>,
    #[arg(long)]
    pub t_min: Option<f64>,
    #[arg(long)]
    pub t_max: Option<f64>,
}

#[derive(Debug, Args)]
pub struct CodesArgs {
    #[arg(long, value_delimiter = ',')]
    pub p: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub m: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    pub q: Option<Vec<f64>>,
    #[arg(long)]
    pub levels: Option<usize>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Checks to run (default: all).
    #[arg(long = "check", value_delimiter = ',')]
    pub checks: Option<Vec<String>>,
    /// Block sizes for the mapping check.
    #[arg(long, value_delimiter = ',')]
    pub m: Option<Vec<usize>>,
    /// Replace every check's tolerance.
    #[arg(long)]
    pub tolerance: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct ScenarioArgs {
    #[arg(long, value_enum)]
    pub kind: Option<ScenarioKindName>,
    #[arg(long)]
    pub n_blocks: Option<usize>,
    #[arg(long, value_enum)]
    pub code: Option<CodeName>,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub levels: Option<usize>,
    #[arg(long, value_enum)]
    pub noise: Option<NoiseName>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub mu_x: Option<f64>,
    #[arg(long)]
    pub mu_y: Option<f64>,
    #[arg(long)]
    pub mu_z: Option<f64>,
    #[arg(long)]
    pub t: Option<f64>,
    #[arg(long)]
    pub theta: Option<f64>,
    #[arg(long, value_enum)]
    pub mode: Option<ModeName>,
    #[arg(long)]
    pub trotter_steps: Option<usize>,
}

pub fn run(cli: Cli) -> Result<()> {
    let mut file = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let out_dir = resolve_out_dir(cli.out_dir, file.output_dir.take());
    let format = cli.format.or(file.format).unwrap_or_default();
    let seed = match &cli.command {
        Command::Verify(v) => v.seed.or(file.seed),
        _ => file.seed,
    };
    // Only the sections a command uses are echoed into its saved config.
    let base = RunConfig { output_dir: None, format: Some(format), seed, ..RunConfig::default() };
    let mut ctx = Context {
        out: OutputDir::create(out_dir)?,
        format,
        exec: if cli.sequential { Execution::Sequential } else { Execution::default() },
        seed: seed.unwrap_or(0),
    };

    match cli.command {
        Command::Qfi(a) => {
            let flags = QfiConfig { model: a.model, n: a.n, p: a.p };
            commands::qfi::run(file.qfi.unwrap_or_default().merge(flags), base, &mut ctx)?;
        }
        Command::Sweep(a) => {
            let flags = SweepConfig {
                n_values: a.n_values,
                n_min: a.n_min,
                n_max: a.n_max,
                points: a.points,
                m_policy: a.m_policy,
                m: a.m,
                gamma: a.gamma,
                mode: a.mode,
                p: a.p,
                plot: a.plot.then_some(true),
            };
            commands::sweep::run(file.sweep.unwrap_or_default().merge(flags), base, &mut ctx)?;
        }
        Command::OptimizeTime(a) => {
            let flags = OptimizeConfig { m: a.m, gamma: a.gamma, n: a.n, t_min: a.t_min, t_max: a.t_max };
            commands::optimize::run(file.optimize_time.unwrap_or_default().merge(flags), base, &mut ctx)?;
        }
        Command::Codes(a) => {
            let flags = CodesConfig { p: a.p, m: a.m, q: a.q, levels: a.levels };
            commands::codes::run(file.codes.unwrap_or_default().merge(flags), base, &mut ctx)?;
        }
        Command::Verify(a) => {
            let flags = VerifyConfig { checks: a.checks, m: a.m, tolerance: a.tolerance };
            commands::verify::run(file.verify.unwrap_or_default().merge(flags), base, &mut ctx)?;
        }
        Command::Scenario(a) => {
            let flags = ScenarioConfig {
                kind: a.kind,
                n_blocks: a.n_blocks,
                code: a.code,
                m: a.m,
                levels: a.levels,
                noise: a.noise,
                gamma: a.gamma,
                mu_x: a.mu_x,
                mu_y: a.mu_y,
                mu_z: a.mu_z,
                t: a.t,
                theta: a.theta,
                mode: a.mode,
                trotter_steps: a.trotter_steps,
            };
            commands::scenario::run(file.scenario.unwrap_or_default().merge(flags), base, &mut ctx)?;
        }
    }
    Ok(())
}

/// Parses the process arguments, runs, and maps the outcome to an exit code.
pub fn main_entry() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
