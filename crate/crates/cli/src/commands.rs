use std::time::Instant;

use nongauss_core::fock::{build_state, delta_g, delta_g_relative, gaussify, von_neumann_entropy, FockConfig, StateKind};
use nongauss_core::gaussian::gaussian_entropy;
use nongauss_core::maps;
use nongauss_core::monotone::{d_g_bound, delta_tilde, divergence_profile, gd_upper_bound, MonotoneConfig, ProfileConfig};

use crate::args::{Command, Format, RunConfig, Suite};
use crate::error::CliError;
use crate::report::{
    MapResult, Num, Output, ParamsReport, Report, StateResult, Status, SweepPoint, SweepResult, Timestamp, Tool,
    VerifyResult, SCHEMA,
};
use crate::suites;

/// States above this Fock dimension skip the relative-entropy cross-check,
/// which needs a dense eigendecomposition.
const RELATIVE_ROUTE_MAX_DIM: usize = 400;

/// Draws used by `map-ng --bound` on top of the vacuum and a TMSV.
pub const GD_SAMPLES: usize = 10;

/// Fock thresholds with `--trace-tol` applied to both build and operation deficits.
pub fn fock_config(cfg: &RunConfig) -> Result<FockConfig, CliError> {
    let mut fc = FockConfig::default();
    if let Some(t) = cfg.trace_tol {
        if !(t > 0.0 && t < 1.0) {
            return Err(CliError::Usage(format!("--trace-tol must lie in (0, 1), got {t}")));
        }
        fc.build_tol = t;
        fc.op_tol = t;
    }
    Ok(fc)
}

/// Optimizer settings of a run. Fock objectives may grow each mode to three
/// times `--cutoff`.
pub fn monotone_config(cfg: &RunConfig, energy_cap: Option<f64>) -> Result<MonotoneConfig, CliError> {
    if let Some(e) = energy_cap {
        if !(e > 0.0 && e.is_finite()) {
            return Err(CliError::Usage(format!("--energy must be positive, got {e}")));
        }
    }
    Ok(MonotoneConfig { seed: cfg.seed, max_cutoff: 3 * cfg.cutoff, energy_cap, fock: fock_config(cfg)?, ..MonotoneConfig::default() })
}

/// Energy grid used by `sweep` when `--grid` is absent.
pub fn default_grid(spec: &str) -> Vec<f64> {
    let name = spec.split(':').next().unwrap_or_default().trim();
    match name {
        "pns" | "pna" => vec![0.5, 1.0, 2.0, 4.0],
        "kerr" => vec![1.0, 2.0, 4.0, 6.0],
        _ => vec![1.0, 2.0, 4.0, 8.0],
    }
}

/// Executes one command and wraps the result with the config echo.
pub fn run(cfg: &RunConfig) -> Result<Report, CliError> {
    if cfg.cutoff < 8 {
        return Err(CliError::Usage(format!("--cutoff must be at least 8, got {}", cfg.cutoff)));
    }
    if cfg.format == Format::Csv && !matches!(cfg.command, Command::Sweep { .. }) {
        return Err(CliError::Usage("CSV output is only available for sweep tables".into()));
    }
    let start = Instant::now();
    let (result, status) = match &cfg.command {
        Command::StateNg { spec } => (Output::State(run_state_ng(spec, cfg)?), Status::Ok),
        Command::MapNg { spec, bound, energy } => (Output::Map(run_map_ng(spec, *bound, *energy, cfg)?), Status::Ok),
        Command::Sweep { spec, grid } => (Output::Sweep(run_sweep(spec, grid.as_deref(), cfg)?), Status::Ok),
        Command::Verify { suite } => {
            let v = run_verify(*suite, cfg)?;
            let status = if v.failed == 0 { Status::Ok } else { Status::Failed };
            (Output::Verify(v), status)
        }
    };
    Ok(Report {
        schema: SCHEMA,
        tool: Tool { name: env!("CARGO_PKG_NAME"), version: env!("CARGO_PKG_VERSION") },
        config: cfg.clone(),
        status,
        result,
        timestamp: Timestamp {
            utc: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            wall_time_s: start.elapsed().as_secs_f64(),
        },
    })
}

/// `δ_G` of a named state at cutoff `--cutoff`.
pub fn run_state_ng(spec: &str, cfg: &RunConfig) -> Result<StateResult, CliError> {
    let fc = fock_config(cfg)?;
    let kind: StateKind = spec.parse().map_err(|e: nongauss_core::Error| CliError::Usage(e.to_string()))?;
    let rho = build_state(kind, cfg.cutoff, &fc)?;
    let deficit = rho.trace_deficit();
    let tol = fc.build_tol;
    let g = gaussify(&rho)?;
    let s = von_neumann_entropy(&rho, &fc)?;
    let sg = gaussian_entropy(&g)?;
    let d = delta_g(&rho, &fc)?;
    let (relative, relative_skipped) = if rho.dim() > RELATIVE_ROUTE_MAX_DIM {
        (None, Some(format!("dimension {} exceeds {RELATIVE_ROUTE_MAX_DIM}", rho.dim())))
    } else {
        match delta_g_relative(&rho, &fc) {
            Ok(v) if v.is_finite() => (Some(Num::new(v, tol, deficit)), None),
            Ok(_) => (None, Some("λ_G(ρ) lost rank in the Fock basis".into())),
            Err(e) => (None, Some(format!("λ_G(ρ) does not fit the cutoff: {e}"))),
        }
    };
    Ok(StateResult {
        state: spec.to_string(),
        modes: kind.n_modes(),
        cutoff: cfg.cutoff,
        delta_g: Num::new(d, tol, deficit),
        delta_g_relative: relative,
        relative_skipped,
        entropy: Num::new(s, tol, deficit),
        gaussian_entropy: Num::new(sg, tol, deficit),
        mean_photons: Num::new(g.total_photons(), tol, deficit),
    })
}

/// Generating power of a registry map: the assisted optimum for conditional
/// unitaries, the unassisted bound otherwise, or the environment bound of a
/// Gaussian-dilatable channel with `bound`.
pub fn run_map_ng(spec: &str, bound: bool, energy: Option<f64>, cfg: &RunConfig) -> Result<MapResult, CliError> {
    let map = maps::from_spec(spec, cfg.cutoff).map_err(|e| CliError::Usage(e.to_string()))?;
    if map.map.n_in != 1 || map.map.n_out != 1 {
        return Err(CliError::Usage(format!(
            "{spec} maps {} mode(s) to {}; map-ng optimizes single-mode maps only (the coherent-projection counterexample is checked by `verify counterexamples`)",
            map.map.n_in, map.map.n_out
        )));
    }
    let mc = monotone_config(cfg, energy)?;
    if bound {
        let g = gd_upper_bound(&map, GD_SAMPLES, &mc)?;
        if g.failed > 0 {
            return Err(CliError::Numerical(format!(
                "{} of {} sampled inputs could not be evaluated; raise --cutoff or --trace-tol",
                g.failed,
                g.samples.len() + g.failed
            )));
        }
        let tol = mc.fock.op_tol;
        return Ok(MapResult::GdUpperBound {
            map: map.name,
            bound: Num::new(g.bound, mc.fock.build_tol, 0.0),
            sampled_max: Num::new(g.sampled_max, tol, g.max_deficit),
            slack: g.slack,
            holds: g.holds,
            samples: g.samples.len(),
            failed: g.failed,
        });
    }
    let res = if map.is_conditional_unitary() { delta_tilde(&map, &mc)? } else { d_g_bound(&map, &mc)? };
    let d = &res.diagnostics;
    let xtol = if d.backend == nongauss_core::monotone::Backend::Fock { mc.fock_nelder_mead.xtol } else { mc.nelder_mead.xtol };
    Ok(MapResult::Optimized {
        map: map.name,
        kind: res.kind,
        value: Num::new(res.value, d.tolerance, d.max_deficit),
        argmax: ParamsReport::new(&res.argmax, xtol, d.max_deficit),
        evaluations: res.evaluations,
        energy_cap: energy,
        diagnostics: res.diagnostics,
    })
}

/// Energy profile of a map over `grid` (or its default grid).
pub fn run_sweep(spec: &str, grid: Option<&[f64]>, cfg: &RunConfig) -> Result<SweepResult, CliError> {
    let map = maps::from_spec(spec, cfg.cutoff).map_err(|e| CliError::Usage(e.to_string()))?;
    let grid = grid.map(<[f64]>::to_vec).unwrap_or_else(|| default_grid(spec));
    let pc = ProfileConfig { monotone: monotone_config(cfg, None)?, ..ProfileConfig::default() };
    let p = divergence_profile(&map, &grid, &pc)?;
    let num = |v| Num::new(v, p.tolerance, p.max_deficit);
    Ok(SweepResult {
        map: spec.to_string(),
        method: p.method,
        note: "energy-constrained diagnostic; not a monotone",
        points: p.grid.iter().zip(&p.delta).map(|(&energy, &d)| SweepPoint { energy, delta: num(d) }).collect(),
        slope_fit: num(p.slope),
        plateau_spread: num(p.plateau_spread),
        classification: p.classification,
        slope_min: pc.slope_min,
        plateau_tol: pc.plateau_tol,
    })
}

/// Runs one verification suite.
pub fn run_verify(suite: Suite, cfg: &RunConfig) -> Result<VerifyResult, CliError> {
    let fc = fock_config(cfg)?;
    let assertions = suites::run_suite(suite, cfg.seed, &fc);
    let passed = assertions.iter().filter(|a| a.passed).count();
    Ok(VerifyResult { suite, seed: cfg.seed, passed, failed: assertions.len() - passed, assertions })
}

/// Serializes a report in the requested format.
pub fn render(report: &Report) -> Result<String, CliError> {
    match (report.config.format, &report.result) {
        (Format::Json, _) => serde_json::to_string_pretty(report)
            .map(|s| s + "\n")
            .map_err(|e| CliError::Numerical(format!("serialization failed: {e}"))),
        (Format::Csv, Output::Sweep(s)) => sweep_csv(s),
        (Format::Csv, _) => Err(CliError::Usage("CSV output is only available for sweep tables".into())),
    }
}

/// `energy, delta, slope_fit, classification` rows, followed by the
/// tolerance and deficit of each δ.
pub fn sweep_csv(s: &SweepResult) -> Result<String, CliError> {
    let err = |e: csv::Error| CliError::Numerical(format!("CSV output failed: {e}"));
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["energy", "delta", "slope_fit", "classification", "tolerance", "deficit"]).map_err(err)?;
    let class = serde_json::to_value(s.classification).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default();
    for p in &s.points {
        w.write_record([
            p.energy.to_string(),
            p.delta.value.to_string(),
            s.slope_fit.value.to_string(),
            class.clone(),
            p.delta.tolerance.to_string(),
            p.delta.deficit.to_string(),
        ])
        .map_err(err)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Numerical(format!("CSV output failed: {e}")))?;
    String::from_utf8(bytes).map_err(|e| CliError::Numerical(format!("CSV output failed: {e}")))
}
