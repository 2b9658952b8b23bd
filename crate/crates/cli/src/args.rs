use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

/// Non-Gaussianity of bosonic states and operations.
#[derive(Debug, Clone, Parser)]
#[command(name = "nongauss", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Per-mode Fock cutoff.
    #[arg(long, global = true, default_value_t = 40, value_parser = clap::value_parser!(u64).range(8..))]
    pub cutoff: u64,
    /// Seed of every sampler and optimizer jitter.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Largest truncation deficit accepted when building states and applying maps.
    #[arg(long, global = true)]
    pub trace_tol: Option<f64>,
    /// Writes the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Command {
    /// δ_G of a named state (`fock:n`, `coherent:re[,im]`, `thermal:N`, `tmsv:NS`, `cat:alpha`).
    StateNg { spec: String },
    /// Generating power of a map (`pns`, `pna`, `bps`, `kerr:γ`, `gd:bs<τ>,env=<state>`, `id`).
    MapNg {
        spec: String,
        /// For Gaussian-dilatable channels: the environment bound with sampled evidence.
        #[arg(long)]
        bound: bool,
        /// Caps the mean photon number of the map's input mode.
        #[arg(long)]
        energy: Option<f64>,
    },
    /// Energy profile and finite/diverging classification.
    Sweep {
        spec: String,
        /// Energies; defaults depend on the map.
        #[arg(long, value_delimiter = ',')]
        grid: Option<Vec<f64>>,
    },
    /// Runs a property suite and reports every assertion.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::StateNg { .. } => "state-ng",
            Command::MapNg { .. } => "map-ng",
            Command::Sweep { .. } => "sweep",
            Command::Verify { .. } => "verify",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    StateProps,
    Lemma1,
    Counterexamples,
    Relent,
    MonotoneProps,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Everything that determines a run; echoed verbatim in the report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub cutoff: usize,
    pub seed: u64,
    pub trace_tol: Option<f64>,
    pub format: Format,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    /// Defaults of the command line for `command`.
    pub fn new(command: Command) -> Self {
        Self { command, cutoff: 40, seed: 0, trace_tol: None, format: Format::Json, out: None }
    }
}

impl From<Cli> for RunConfig {
    fn from(c: Cli) -> Self {
        Self { command: c.command, cutoff: c.cutoff as usize, seed: c.seed, trace_tol: c.trace_tol, format: c.format, out: c.out }
    }
}
