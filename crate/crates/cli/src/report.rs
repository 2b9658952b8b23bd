use serde::Serialize;

use nongauss_core::monotone::{Classification, Diagnostics, InputParams, ProfileMethod, ResultKind};

use crate::args::RunConfig;

/// Version tag of the JSON layout.
pub const SCHEMA: &str = "nongauss/1";

/// A computed number with the tolerance it was held to and the truncation
/// deficit measured while computing it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Num {
    pub value: f64,
    pub tolerance: f64,
    pub deficit: f64,
}

impl Num {
    pub fn new(value: f64, tolerance: f64, deficit: f64) -> Self {
        Self { value, tolerance, deficit }
    }

    /// Closed-form or exact quantities.
    pub fn exact(value: f64) -> Self {
        Self { value, tolerance: 0.0, deficit: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Tool {
    pub name: &'static str,
    pub version: &'static str,
}

/// The only field that differs between identical runs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Timestamp {
    pub utc: String,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    /// At least one verify assertion failed.
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub tool: Tool,
    pub config: RunConfig,
    pub status: Status,
    pub result: Output,
    pub timestamp: Timestamp,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Output {
    State(StateResult),
    Map(MapResult),
    Sweep(SweepResult),
    Verify(VerifyResult),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StateResult {
    pub state: String,
    pub modes: usize,
    pub cutoff: usize,
    pub delta_g: Num,
    /// `S(ρ‖λ_G(ρ))` with the Gaussian reference rebuilt in the Fock basis;
    /// only for small dimensions.
    pub delta_g_relative: Option<Num>,
    /// Why the relative-entropy route is absent.
    pub relative_skipped: Option<String>,
    pub entropy: Num,
    pub gaussian_entropy: Num,
    pub mean_photons: Num,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParamsReport {
    pub alpha_re: Num,
    pub alpha_im: Num,
    pub theta: Num,
    pub r: Num,
    pub n_s: Num,
}

impl ParamsReport {
    pub fn new(p: &InputParams, tolerance: f64, deficit: f64) -> Self {
        let n = |v| Num::new(v, tolerance, deficit);
        Self { alpha_re: n(p.alpha.re), alpha_im: n(p.alpha.im), theta: n(p.theta), r: n(p.r), n_s: n(p.n_s) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum MapResult {
    /// Optimized over the input family (`delta_tilde`) or over unentangled
    /// Gaussian inputs (`d_g_bound`).
    Optimized {
        map: String,
        kind: ResultKind,
        value: Num,
        argmax: ParamsReport,
        evaluations: usize,
        energy_cap: Option<f64>,
        diagnostics: Diagnostics,
    },
    /// Environment bound of a Gaussian-dilatable channel.
    GdUpperBound { map: String, bound: Num, sampled_max: Num, slack: f64, holds: bool, samples: usize, failed: usize },
}

impl MapResult {
    /// Headline number of the result.
    pub fn value(&self) -> f64 {
        match self {
            MapResult::Optimized { value, .. } => value.value,
            MapResult::GdUpperBound { bound, .. } => bound.value,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepPoint {
    pub energy: f64,
    pub delta: Num,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub map: String,
    pub method: ProfileMethod,
    /// Energy-constrained values are diagnostics, not monotones.
    pub note: &'static str,
    pub points: Vec<SweepPoint>,
    pub slope_fit: Num,
    pub plateau_spread: Num,
    pub classification: Classification,
    pub slope_min: f64,
    pub plateau_tol: f64,
}

/// How `measured` is compared with `tolerance`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// Passes when `measured ≤ tolerance` (a deviation).
    AtMost,
    /// Passes when `measured > tolerance` (a margin).
    Above,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Assertion {
    pub name: String,
    pub measured: f64,
    pub tolerance: f64,
    pub relation: Relation,
    pub passed: bool,
    pub detail: String,
}

impl Assertion {
    /// A deviation that must stay within `tolerance`. NaN fails.
    pub fn at_most(name: impl Into<String>, measured: f64, tolerance: f64, detail: impl Into<String>) -> Self {
        Self { name: name.into(), measured, tolerance, relation: Relation::AtMost, passed: measured <= tolerance, detail: detail.into() }
    }

    /// A margin that must exceed `threshold`. NaN fails.
    pub fn above(name: impl Into<String>, measured: f64, threshold: f64, detail: impl Into<String>) -> Self {
        Self { name: name.into(), measured, tolerance: threshold, relation: Relation::Above, passed: measured > threshold, detail: detail.into() }
    }

    /// An assertion whose computation itself failed.
    pub fn errored(name: impl Into<String>, tolerance: f64, error: impl core::fmt::Display) -> Self {
        Self {
            name: name.into(),
            measured: f64::NAN,
            tolerance,
            relation: Relation::AtMost,
            passed: false,
            detail: format!("error: {error}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyResult {
    pub suite: crate::args::Suite,
    pub seed: u64,
    pub passed: usize,
    pub failed: usize,
    pub assertions: Vec<Assertion>,
}
