//! Library half of the `nongauss` command-line tool.
//!
//! [`Cli`] is the clap definition, [`run`] executes a parsed [`RunConfig`]
//! and returns a [`Report`] that serializes to the `nongauss/1` JSON schema.
//! The binary only adds output handling and exit codes.

mod args;
mod commands;
mod error;
mod report;
pub mod suites;

pub use args::{Cli, Command, Format, RunConfig, Suite};
pub use commands::{
    default_grid, fock_config, monotone_config, render, run, run_map_ng, run_state_ng, run_sweep, run_verify, sweep_csv, GD_SAMPLES,
};
pub use error::CliError;
pub use report::{
    Assertion, MapResult, Num, Output, ParamsReport, Relation, Report, StateResult, Status, SweepPoint, SweepResult,
    Timestamp, Tool, VerifyResult, SCHEMA,
};
