//! Command-line driver: reads a TOML config, runs one subcommand and writes
//! CSV (optionally SVG) files to the output directory.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod svg;

use commands::Context;
use config::RunConfig;
pub use error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "dqdot",
    version,
    about = "Double quantum dot spectra in a transverse magnetic field"
)]
pub struct Cli {
    /// TOML configuration; all keys default to the published device.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Output directory (overrides `[output] dir`).
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,

    /// Worker threads for sweeps; 0 uses every core.
    #[arg(long, global = true, value_name = "N")]
    pub threads: Option<usize>,

    /// Also write SVG plots.
    #[arg(long, global = true)]
    pub svg: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Levels and emission lines at one (L, B).
    Solve,
    /// Zero-field gap and electron levels against barrier thickness.
    SweepL,
    /// Emission lines against field.
    SweepB,
    /// Well depths from two measured uncoupled-dot emission lines.
    Calibrate {
        /// TOML file with `emission_low` and `emission_high` (meV).
        #[arg(long, value_name = "PATH")]
        targets: PathBuf,
    },
    /// Fit A/(L+δ)³ + C to a `L_nm,gap_meV` CSV.
    FitPowerlaw {
        #[arg(long, value_name = "PATH")]
        points: PathBuf,
    },
}

/// Runs the parsed command and returns the files written.
pub fn run(cli: &Cli) -> Result<Vec<PathBuf>, CliError> {
    let config = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let threads = cli.threads.unwrap_or(config.output.threads);
    let ctx = Context {
        out: cli.out.clone().unwrap_or_else(|| config.output.dir.clone()),
        svg: cli.svg || config.output.svg,
        config,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::config(format!("cannot start {threads} threads: {e}")))?;
    pool.install(|| match &cli.command {
        Command::Solve => commands::solve(&ctx),
        Command::SweepL => commands::sweep_l(&ctx),
        Command::SweepB => commands::sweep_b(&ctx),
        Command::Calibrate { targets } => commands::calibrate(&ctx, targets),
        Command::FitPowerlaw { points } => commands::fit_powerlaw_cmd(&ctx, points),
    })
}
