//! Command-line experiment runner: presets, configuration files and data
//! files for external plotting.

pub mod config;
pub mod error;
pub mod experiment;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use config::{ExperimentSpec, RawConfig, SchemeChoice};
pub use error::{CliError, Result};
pub use experiment::{run_experiment, ExperimentReport};

#[derive(Debug, Parser)]
#[command(name = "sharpshock", version, about = "Nonclassical shock experiments for scalar conservation laws")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a preset or a configured experiment.
    Run(Box<RunArgs>),
    /// List the available presets.
    Presets,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// test-a .. test-g, convex-concave-1, convex-concave-2, advection-demo or custom.
    #[arg(long)]
    pub preset: Option<String>,
    #[arg(long, conflicts_with = "dx")]
    pub cells: Option<usize>,
    #[arg(long)]
    pub dx: Option<f64>,
    #[arg(long)]
    pub t_end: Option<f64>,
    /// upwind, reconstruction, variant, advection or glimm.
    #[arg(long)]
    pub scheme: Option<String>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub cfl: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Freeze the time step at a bound valid for the whole run.
    #[arg(long)]
    pub fixed_dt: bool,
    /// Starting index in the van der Corput sequence.
    #[arg(long)]
    pub seq_offset: Option<u64>,
    /// Mesh halvings for a convergence study.
    #[arg(long)]
    pub refine: Option<usize>,
    /// Flat TOML file; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

impl RunArgs {
    pub fn to_raw(&self) -> Result<RawConfig> {
        let file = match &self.config {
            Some(path) => RawConfig::load(path)?,
            None => RawConfig::default(),
        };
        let flags = RawConfig {
            preset: self.preset.clone(),
            scheme: self.scheme.clone(),
            cells: self.cells,
            dx: self.dx,
            t_end: self.t_end,
            beta: self.beta,
            cfl: self.cfl,
            out: self.out.clone(),
            fixed_dt: self.fixed_dt.then_some(true),
            seq_offset: self.seq_offset,
            refine: self.refine,
            ..RawConfig::default()
        };
        Ok(file.overlay(flags))
    }
}
