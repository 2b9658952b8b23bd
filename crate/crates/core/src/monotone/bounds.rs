//! Generating-power evaluators: the entanglement-assisted optimum over the
//! input family, unassisted lower bounds, closed-form bounds and energy
//! profiles.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
#[allow(unused_imports)]
use num_traits::Float;

use super::analytic::{analytic_entropy, analytic_output, AnalyticForm};
use super::family::{fock_cutoffs, output_state_fock, output_state_fock_within, InputParams, MAX_AUTO_CUTOFF};
use super::optimize::{nelder_mead_max, NelderMeadOptions};
use super::sample;
use crate::error::invalid_arg;
use crate::fock::{apply_map, delta_g, gaussian_to_fock, FockArray, FockConfig, MapBody};
use crate::gaussian::{gaussian_entropy, GaussianState, SymplecticOp};
use crate::maps::{MapDescriptor, MapMeta};
use crate::{linalg, Error, Result, C64};

/// How objective values were computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Backend {
    /// Moment factoring over the TMSV.
    Analytic,
    /// Exact phase-space formulas for mixtures of two Gaussian unitaries.
    PhaseSpace,
    /// Truncated Fock simulation.
    Fock,
}

/// Which quantity a [`MonotoneResult`] bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ResultKind {
    /// Entanglement-assisted generating power, maximized over the input family.
    DeltaTilde,
    /// Unassisted generating power over single-mode Gaussian inputs; a lower
    /// bound on the assisted one.
    DgBound,
}

/// Start lattice of the multistart search.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Lattice {
    pub alpha: Vec<f64>,
    pub theta: Vec<f64>,
    pub r: Vec<f64>,
    pub n_s: Vec<f64>,
}

impl Default for Lattice {
    fn default() -> Self {
        Self {
            alpha: vec![0.0, 0.5, 1.0, 1.5],
            theta: vec![0.0, FRAC_PI_4, FRAC_PI_2],
            r: vec![0.0, 0.3, 0.6],
            n_s: vec![0.1, 0.5, 1.0, 2.0],
        }
    }
}

impl Lattice {
    /// Small lattice for expensive (Fock) objectives.
    pub fn reduced() -> Self {
        Self { alpha: vec![0.0, 1.0], theta: vec![0.0, FRAC_PI_2], r: vec![0.0, 0.3], n_s: vec![0.5, 1.0] }
    }

    fn points(&self) -> Vec<InputParams> {
        let mut out = Vec::new();
        for &a in &self.alpha {
            for &t in &self.theta {
                for &r in &self.r {
                    for &n in &self.n_s {
                        out.push(InputParams { alpha: C64::new(a, 0.0), theta: t, r, n_s: n });
                    }
                }
            }
        }
        out
    }
}

/// Search box: points outside are treated as infeasible.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Domain {
    pub alpha_max: f64,
    pub r_max: f64,
    pub n_s_max: f64,
}

impl Default for Domain {
    fn default() -> Self {
        Self { alpha_max: 8.0, r_max: 2.5, n_s_max: 50.0 }
    }
}

impl Domain {
    fn contains(&self, p: &InputParams) -> bool {
        p.alpha.norm() <= self.alpha_max && p.r.abs() <= self.r_max && p.n_s <= self.n_s_max
    }
}

/// Optimizer settings shared by [`delta_tilde`] and [`d_g_bound`].
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MonotoneConfig {
    /// Jitters the initial simplex of every start.
    pub seed: u64,
    pub lattice: Lattice,
    /// Lattice used when the objective needs the Fock backend.
    pub fock_lattice: Lattice,
    pub nelder_mead: NelderMeadOptions,
    /// Local refinement settings when the objective needs the Fock backend.
    pub fock_nelder_mead: NelderMeadOptions,
    /// Per-mode cutoff budget of Fock objectives; inputs needing more count
    /// as infeasible and set the `N_S` frontier.
    pub max_cutoff: usize,
    /// Mean photon number allowed in the map's input mode.
    pub energy_cap: Option<f64>,
    pub domain: Domain,
    pub fock: FockConfig,
    /// Forces a backend; `None` picks the cheapest exact one.
    pub backend: Option<Backend>,
    /// Central-difference step of the stationarity check.
    pub gradient_step: f64,
    /// Number of seeded mixed (squeezed-thermal) inputs added by [`d_g_bound`].
    pub mixed_samples: usize,
}

impl Default for MonotoneConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            lattice: Lattice::default(),
            fock_lattice: Lattice::reduced(),
            nelder_mead: NelderMeadOptions::default(),
            fock_nelder_mead: NelderMeadOptions { max_evals: 80, ftol: 1e-6, xtol: 1e-4 },
            max_cutoff: 120,
            energy_cap: None,
            domain: Domain::default(),
            fock: FockConfig::default(),
            backend: None,
            gradient_step: 1e-4,
            mixed_samples: 6,
        }
    }
}

/// One objective evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EvalRecord {
    pub params: InputParams,
    pub value: f64,
}

/// Numerical health of a [`MonotoneResult`].
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Diagnostics {
    pub backend: Backend,
    /// Largest truncation deficit among the recorded evaluations (0 off Fock).
    pub max_deficit: f64,
    /// Central-difference gradient norm at the argmax (`None` when a
    /// neighbouring point was infeasible in both directions).
    pub gradient_norm: Option<f64>,
    /// Value tolerance of the local refinement.
    pub tolerance: f64,
    pub starts: usize,
    /// Evaluations that failed (truncation, zero probability, numerics).
    pub failed: usize,
    /// Largest `N_S` evaluated successfully.
    pub n_s_reached: f64,
    /// Smallest `N_S` at which the truncation budget was exceeded.
    pub n_s_frontier: Option<f64>,
}

/// Maximum of a generating-power objective with its provenance.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MonotoneResult {
    pub kind: ResultKind,
    /// Bits; equals the best value in `trace`.
    pub value: f64,
    /// For [`ResultKind::DgBound`], `n_s` is the thermal occupation of an
    /// unentangled input `D_α R_θ S_r ρ_th`.
    pub argmax: InputParams,
    pub evaluations: usize,
    pub trace: Vec<EvalRecord>,
    pub diagnostics: Diagnostics,
}

type Objective<'a> = dyn FnMut(&InputParams) -> Result<(f64, f64)> + 'a;

fn to_x(p: &InputParams) -> [f64; 4] {
    [p.alpha.re, p.theta, p.r, p.n_s.sqrt()]
}

fn from_x(x: &[f64]) -> InputParams {
    InputParams { alpha: C64::new(x[0], 0.0), theta: x[1], r: x[2], n_s: x[3] * x[3] }
}

/// Starts that spend the whole energy budget in different proportions.
fn saturating_starts(cap: f64, pure: bool) -> Vec<InputParams> {
    let e = 0.999 * cap;
    let mut out = Vec::new();
    let weights: &[(f64, f64)] =
        if pure { &[(1.0, 0.0), (0.0, 0.0), (0.5, 0.0), (0.25, 0.0), (0.75, 0.0)] } else { &[(1.0, 0.0), (0.0, 1.0), (0.0, 0.0), (0.5, 0.0), (0.5, 0.5), (0.0, 0.5)] };
    for &(wa, wn) in weights {
        let a2 = wa * e;
        let n = wn * e;
        let c = (2.0 * (e - a2) + 1.0) / (2.0 * n + 1.0);
        let r = 0.5 * c.max(1.0).acosh();
        for theta in [0.0, FRAC_PI_2] {
            out.push(InputParams { alpha: C64::new(a2.sqrt(), 0.0), theta, r, n_s: n });
        }
    }
    out
}

struct Search {
    kind: ResultKind,
    backend: Backend,
    starts: Vec<InputParams>,
    /// Keep `N_S = 0` (pure unentangled inputs).
    pure: bool,
}

fn run_search(search: Search, obj: &mut Objective<'_>, cfg: &MonotoneConfig) -> Result<MonotoneResult> {
    let mut rng = sample::rng(cfg.seed);
    let mut trace: Vec<EvalRecord> = Vec::new();
    let mut evaluations = 0usize;
    let mut failed = 0usize;
    let mut max_deficit = 0.0f64;
    let mut n_s_reached = 0.0f64;
    let mut frontier: Option<f64> = None;
    let mut last_error: Option<Error> = None;
    let cap = cfg.energy_cap;
    let pure = search.pure;
    let dims = if pure { 3 } else { 4 };

    let mut eval = |p: &InputParams, trace: &mut Vec<EvalRecord>| -> f64 {
        evaluations += 1;
        if p.check().is_err() || !cfg.domain.contains(p) {
            return f64::NEG_INFINITY;
        }
        if let Some(c) = cap {
            if p.energy() > c * (1.0 + 1e-12) {
                return f64::NEG_INFINITY;
            }
        }
        match obj(p) {
            Ok((v, deficit)) if v.is_finite() => {
                max_deficit = max_deficit.max(deficit);
                n_s_reached = n_s_reached.max(p.n_s);
                trace.push(EvalRecord { params: *p, value: v });
                v
            }
            Ok(_) => {
                failed += 1;
                f64::NEG_INFINITY
            }
            Err(e) => {
                failed += 1;
                if matches!(e, Error::Truncation { .. }) {
                    frontier = Some(frontier.map_or(p.n_s, |f: f64| f.min(p.n_s)));
                }
                last_error = Some(e);
                f64::NEG_INFINITY
            }
        }
    };

    let base_steps = [0.25, 0.3, 0.15, 0.25];
    for start in &search.starts {
        let x0 = to_x(start);
        let steps: Vec<f64> = base_steps[..dims]
            .iter()
            .map(|s| {
                let j = sample::uniform(&mut rng, 0.8, 1.2);
                if rng.random_bool_half() { s * j } else { -s * j }
            })
            .collect();
        let f = |x: &[f64]| {
            let mut full = [0.0; 4];
            full[..dims].copy_from_slice(x);
            eval(&from_x(&full), &mut trace)
        };
        let opts = if search.backend == Backend::Fock { &cfg.fock_nelder_mead } else { &cfg.nelder_mead };
        nelder_mead_max(f, &x0[..dims], &steps, opts);
    }

    let best = trace
        .iter()
        .enumerate()
        .max_by(|(i, a), (j, b)| a.value.total_cmp(&b.value).then(j.cmp(i)))
        .map(|(_, r)| *r);
    let Some(best) = best else {
        return Err(match (frontier, last_error) {
            (_, Some(e)) => e,
            (None, None) => Error::Numerical(String::from("no feasible starting point")),
            (Some(f), None) => Error::Truncation { deficit: f64::NAN, bound: cfg.fock.op_tol, suggested_cutoff: MAX_AUTO_CUTOFF + f as usize },
        });
    };

    // stationarity at the argmax, without recording the probes
    let h = cfg.gradient_step;
    let x = to_x(&best.params);
    let mut g2 = 0.0;
    let mut gradient_ok = true;
    let mut probe = |p: &InputParams| -> f64 {
        if cap.is_some_and(|c| p.energy() > c * (1.0 + 1e-12)) || p.check().is_err() || !cfg.domain.contains(p) {
            return f64::NEG_INFINITY;
        }
        obj(p).map(|v| v.0).unwrap_or(f64::NEG_INFINITY)
    };
    for i in 0..dims {
        let mut xp = x;
        let mut xm = x;
        xp[i] += h;
        xm[i] -= h;
        let (fp, fm) = (probe(&from_x(&xp)), probe(&from_x(&xm)));
        let gi = match (fp.is_finite(), fm.is_finite()) {
            (true, true) => (fp - fm) / (2.0 * h),
            (true, false) => (fp - best.value) / h,
            (false, true) => (best.value - fm) / h,
            (false, false) => {
                gradient_ok = false;
                0.0
            }
        };
        g2 += gi * gi;
    }

    Ok(MonotoneResult {
        kind: search.kind,
        value: best.value,
        argmax: best.params,
        evaluations,
        trace,
        diagnostics: Diagnostics {
            backend: search.backend,
            max_deficit,
            gradient_norm: gradient_ok.then(|| g2.sqrt()),
            tolerance: if search.backend == Backend::Fock { cfg.fock_nelder_mead.ftol } else { cfg.nelder_mead.ftol },
            starts: search.starts.len(),
            failed,
            n_s_reached,
            n_s_frontier: frontier,
        },
    })
}

trait HalfCoin {
    fn random_bool_half(&mut self) -> bool;
}

impl<R: rand::Rng> HalfCoin for R {
    fn random_bool_half(&mut self) -> bool {
        self.random::<bool>()
    }
}

fn starts_for(cfg: &MonotoneConfig, lattice: &Lattice, pure: bool) -> Vec<InputParams> {
    let mut starts: Vec<InputParams> = lattice
        .points()
        .into_iter()
        .map(|mut p| {
            if pure {
                p.n_s = 0.0;
            }
            p
        })
        .filter(|p| cfg.energy_cap.map_or(true, |c| p.energy() <= c))
        .collect();
    if let Some(c) = cfg.energy_cap {
        starts.extend(saturating_starts(c, pure));
    }
    // drop duplicates (pure starts collapse the N_S axis)
    let mut unique: Vec<InputParams> = Vec::with_capacity(starts.len());
    for s in starts {
        if !unique.contains(&s) {
            unique.push(s);
        }
    }
    unique
}

fn pure_output_delta(out: &FockArray, cfg: &FockConfig) -> Result<(f64, f64)> {
    Ok((delta_g(out, cfg)?, out.trace_deficit()))
}

/// Checks that `map` keeps a generic pure two-mode input pure.
fn purity_probe(map: &MapDescriptor, cfg: &FockConfig) -> Result<bool> {
    let p = InputParams { alpha: C64::new(0.4, 0.2), theta: 0.3, r: 0.2, n_s: 0.3 };
    let out = output_state_fock(&map.map, &p, cfg)?;
    Ok(out.purity()? >= 1.0 - 1e-6)
}

/// Entanglement-assisted generating power of a conditional unitary map,
/// maximized over the four-parameter input family.
///
/// The output of such a map on a pure input is pure, so the objective is the
/// entropy of the Gaussified output. Fails with [`Error::UnsupportedMap`] for
/// maps that do not keep pure states pure.
pub fn delta_tilde(map: &MapDescriptor, cfg: &MonotoneConfig) -> Result<MonotoneResult> {
    if map.map.n_in != 1 || map.map.n_out != 1 {
        return Err(Error::UnsupportedMap(alloc::format!("{}: only single-mode maps are optimized", map.name)));
    }
    if !map.is_conditional_unitary() || !purity_probe(map, &cfg.fock)? {
        return Err(Error::UnsupportedMap(alloc::format!(
            "{} is not a conditional unitary map; use d_g_bound or divergence_profile",
            map.name
        )));
    }
    let form = AnalyticForm::extract(map);
    let backend = match (cfg.backend, &form) {
        (Some(Backend::Analytic), None) => return Err(invalid_arg!("{} has no analytic form", map.name)),
        (Some(Backend::PhaseSpace), _) => return Err(invalid_arg!("phase-space backend only serves Gaussian mixtures")),
        (Some(b), _) => b,
        (None, Some(_)) => Backend::Analytic,
        (None, None) => Backend::Fock,
    };
    let fock_cfg = cfg.fock;
    let mut obj: alloc::boxed::Box<Objective<'_>> = match backend {
        Backend::Analytic => {
            let form = form.clone().ok_or_else(|| invalid_arg!("{} has no analytic form", map.name))?;
            alloc::boxed::Box::new(move |p: &InputParams| Ok((analytic_entropy(p, &form)?, 0.0)))
        }
        _ => {
            let budget = cfg.max_cutoff;
            alloc::boxed::Box::new(move |p: &InputParams| {
                pure_output_delta(&output_state_fock_within(&map.map, p, &fock_cfg, budget)?, &fock_cfg)
            })
        }
    };
    let lattice = if backend == Backend::Fock { &cfg.fock_lattice } else { &cfg.lattice };
    let starts = starts_for(cfg, lattice, false);
    run_search(Search { kind: ResultKind::DeltaTilde, backend, starts, pure: false }, obj.as_mut(), cfg)
}

/// Reduced single-mode input `D_α R_θ S_r ρ_th(N_S)`.
fn single_mode_input(p: &InputParams) -> Result<GaussianState> {
    GaussianState::thermal(p.n_s)?.apply(&p.local_op()?)
}

/// `(α, θ, r, N)` with `state = D_α R_θ S_r ρ_th(N)`, `r ≥ 0`.
pub fn single_mode_params(state: &GaussianState) -> Result<InputParams> {
    if state.n_modes() != 1 {
        return Err(invalid_arg!("expected a single-mode state"));
    }
    let c = state.cov();
    let det = c[(0, 0)] * c[(1, 1)] - c[(0, 1)] * c[(1, 0)];
    let mu = det.max(1.0).sqrt();
    let (a, b, d) = (c[(0, 0)] / mu, c[(0, 1)] / mu, c[(1, 1)] / mu);
    // eigenvalues e^{∓2r} of the unit-determinant part
    let half = 0.5 * (a + d);
    let disc = (0.25 * (a - d) * (a - d) + b * b).sqrt();
    let lo = (half - disc).max(1e-300);
    let r = -0.5 * lo.ln();
    // eigenvector (cos θ, −sin θ) of the smaller eigenvalue
    let theta = if disc < 1e-14 { 0.0 } else { f64::atan2(-(lo - a), b) };
    let theta = if b.abs() < 1e-300 && disc >= 1e-14 {
        if a <= d { 0.0 } else { FRAC_PI_2 }
    } else {
        theta
    };
    let m = state.mean();
    Ok(InputParams { alpha: C64::new(m[0] / 2.0, m[1] / 2.0), theta, r: r.max(0.0), n_s: (mu - 1.0) / 2.0 })
}

/// Gaussian unitaries of a mixture map, if it is one.
fn gaussian_mixture(map: &MapDescriptor) -> Option<Vec<(f64, SymplecticOp)>> {
    let MapBody::Mixture(list) = &map.map.body else {
        return None;
    };
    if map.map.n_in != 1 {
        return None;
    }
    list.iter().map(|(p, g)| g.to_symplectic(1).ok().flatten().map(|op| (*p, op))).collect()
}

/// `δ_G` of `Σ p_k U_k ψ U_k†` for two Gaussian unitaries and a pure Gaussian `ψ`.
///
/// The Gaussified mixture has the averaged mean and covariance plus the
/// spread of the means; the mixture of two pure states has eigenvalues
/// `(1 ± √(1 − 4p₁p₂(1 − |⟨ψ₁|ψ₂⟩|²)))/2`.
fn two_mixture_delta(psi: &GaussianState, parts: &[(f64, SymplecticOp)], modes: &[usize]) -> Result<f64> {
    let n = psi.n_modes();
    let mut states = Vec::new();
    for (p, op) in parts {
        if *p > 0.0 {
            states.push((*p, psi.apply(&op.embed(n, modes)?)?));
        }
    }
    let total: f64 = states.iter().map(|s| s.0).sum();
    if states.is_empty() || states.len() > 2 || (total - 1.0).abs() > 1e-9 {
        return Err(invalid_arg!("phase-space mixtures need one or two unitaries with unit total weight"));
    }
    let mut mean = nalgebra::DVector::zeros(2 * n);
    for (p, s) in &states {
        mean += s.mean() * *p;
    }
    let mut cov = nalgebra::DMatrix::zeros(2 * n, 2 * n);
    for (p, s) in &states {
        let dm = s.mean() - &mean;
        cov += (s.cov() + &dm * dm.transpose()) * *p;
    }
    let sg = gaussian_entropy(&GaussianState::new(mean, cov)?)?;
    let s_out = if states.len() == 1 {
        0.0
    } else {
        let c2 = states[0].1.overlap(&states[1].1)?.clamp(0.0, 1.0);
        let root = (1.0 - 4.0 * states[0].0 * states[1].0 * (1.0 - c2)).max(0.0).sqrt();
        linalg::entropy_bits([(1.0 + root) / 2.0, (1.0 - root) / 2.0], 1e-300)
    };
    Ok((sg - s_out).max(0.0))
}

/// Exact `δ_G` of `(I ⊗ φ)(ψ_p)` for a mixture `φ` of two Gaussian unitaries.
pub fn mixture_assisted_delta(map: &MapDescriptor, p: &InputParams) -> Result<f64> {
    let parts = gaussian_mixture(map).ok_or(Error::UnsupportedMap(map.name.clone()))?;
    two_mixture_delta(&super::family::input_family_gaussian(p)?, &parts, &[1])
}

fn auto_single_mode_fock(state: &GaussianState, cfg: &FockConfig, max_cutoff: usize) -> Result<FockArray> {
    let p = single_mode_params(state)?;
    let mut d = fock_cutoffs(&p, cfg.op_tol.min(cfg.build_tol * 100.0))[1];
    if d > max_cutoff {
        return Err(Error::Truncation { deficit: f64::NAN, bound: cfg.op_tol, suggested_cutoff: d });
    }
    loop {
        match gaussian_to_fock(state, d, cfg) {
            Err(Error::Truncation { .. }) if d < max_cutoff => d = (d * 3 / 2).min(max_cutoff),
            other => return other,
        }
    }
}

/// `δ_G(φ(ρ))` for a single-mode Gaussian input `ρ`, with the truncation deficit.
fn unassisted_value(map: &MapDescriptor, rho: &GaussianState, pure: bool, cfg: &MonotoneConfig) -> Result<(f64, f64, Backend)> {
    if pure && cfg.backend != Some(Backend::Fock) {
        if let Some(parts) = gaussian_mixture(map) {
            if parts.iter().filter(|x| x.0 > 0.0).count() <= 2 {
                return Ok((two_mixture_delta(rho, &parts, &[0])?, 0.0, Backend::PhaseSpace));
            }
        }
        if let Some(form) = AnalyticForm::extract(map) {
            let p = single_mode_params(rho)?;
            let out = analytic_output(&InputParams { n_s: 0.0, ..p }, &form)?;
            return Ok((gaussian_entropy(&out.partial_trace(&[1])?)?, 0.0, Backend::Analytic));
        }
    }
    let input = auto_single_mode_fock(rho, &cfg.fock, cfg.max_cutoff)?;
    let out = apply_map(&input, &map.map, &cfg.fock)?.state;
    Ok((delta_g(&out, &cfg.fock)?, out.trace_deficit(), Backend::Fock))
}

fn check_single_mode(map: &MapDescriptor) -> Result<()> {
    if map.map.n_in != 1 || map.map.n_out != 1 {
        return Err(invalid_arg!("{} is not a single-mode map", map.name));
    }
    Ok(())
}

/// Unassisted lower bound over the supplied single-mode Gaussian inputs.
pub fn d_g_bound_states(map: &MapDescriptor, inputs: &[GaussianState], cfg: &MonotoneConfig) -> Result<MonotoneResult> {
    check_single_mode(map)?;
    if inputs.is_empty() {
        return Err(invalid_arg!("d_g_bound needs at least one input state"));
    }
    let mut trace = Vec::new();
    let mut max_deficit = 0.0f64;
    let mut backend = Backend::Fock;
    let mut failed = 0;
    let mut last_err = None;
    for s in inputs {
        if s.n_modes() != 1 {
            return Err(invalid_arg!("d_g_bound inputs must be single-mode"));
        }
        let pure = s.is_pure(1e-9)?;
        match unassisted_value(map, s, pure, cfg) {
            Ok((v, def, b)) => {
                max_deficit = max_deficit.max(def);
                backend = b;
                trace.push(EvalRecord { params: single_mode_params(s)?, value: v });
            }
            Err(e) => {
                failed += 1;
                last_err = Some(e);
            }
        }
    }
    let best = trace
        .iter()
        .enumerate()
        .max_by(|(i, a), (j, b)| a.value.total_cmp(&b.value).then(j.cmp(i)))
        .map(|(_, r)| *r)
        .ok_or_else(|| last_err.unwrap_or(Error::Numerical("no input could be evaluated".into())))?;
    Ok(MonotoneResult {
        kind: ResultKind::DgBound,
        value: best.value,
        argmax: best.params,
        evaluations: inputs.len(),
        trace,
        diagnostics: Diagnostics {
            backend,
            max_deficit,
            gradient_norm: None,
            tolerance: 0.0,
            starts: inputs.len(),
            failed,
            n_s_reached: 0.0,
            n_s_frontier: None,
        },
    })
}

/// Default unentangled inputs: a coherent grid plus seeded squeezed-thermal
/// states, all within `energy_cap` (default 4 photons).
pub fn d_g_default_inputs(energy_cap: Option<f64>, seed: u64, mixed: usize) -> Result<Vec<GaussianState>> {
    let cap = energy_cap.unwrap_or(4.0);
    let mut out = Vec::new();
    let mut a = 0.25;
    while a * a <= cap {
        out.push(GaussianState::coherent(C64::new(a, 0.0))?);
        a += 0.25;
    }
    let mut rng = sample::rng(seed ^ 0x5eed);
    while out.len() < 64 && out.iter().filter(|s| !s.is_pure(1e-9).unwrap_or(true)).count() < mixed {
        let p = InputParams {
            alpha: C64::from_polar(sample::uniform(&mut rng, 0.0, cap.sqrt()), sample::uniform(&mut rng, 0.0, 2.0 * PI)),
            theta: sample::uniform(&mut rng, 0.0, PI),
            r: sample::uniform(&mut rng, 0.0, 0.6),
            n_s: sample::uniform(&mut rng, 0.05, 0.5),
        };
        if p.energy() <= cap {
            out.push(single_mode_input(&p)?);
        }
    }
    Ok(out)
}

/// Unassisted generating power: multistart search over pure single-mode
/// Gaussian inputs, merged with [`d_g_default_inputs`].
///
/// A lower bound on the assisted generating power for every conditional map.
pub fn d_g_bound(map: &MapDescriptor, cfg: &MonotoneConfig) -> Result<MonotoneResult> {
    check_single_mode(map)?;
    let probe = single_mode_input(&InputParams { alpha: C64::new(0.5, 0.0), theta: 0.0, r: 0.1, n_s: 0.0 })?;
    let backend = unassisted_value(map, &probe, true, cfg).map(|v| v.2).unwrap_or(Backend::Fock);
    let lattice = if backend == Backend::Fock { &cfg.fock_lattice } else { &cfg.lattice };
    let starts = starts_for(cfg, lattice, true);
    let mut obj = |p: &InputParams| -> Result<(f64, f64)> {
        let (v, d, _) = unassisted_value(map, &single_mode_input(p)?, true, cfg)?;
        Ok((v, d))
    };
    let mut res = run_search(Search { kind: ResultKind::DgBound, backend, starts, pure: true }, &mut obj, cfg)?;
    let extra = d_g_bound_states(map, &d_g_default_inputs(cfg.energy_cap, cfg.seed, cfg.mixed_samples)?, cfg)?;
    res.evaluations += extra.evaluations;
    res.diagnostics.failed += extra.diagnostics.failed;
    res.diagnostics.max_deficit = res.diagnostics.max_deficit.max(extra.diagnostics.max_deficit);
    if extra.value > res.value {
        res.value = extra.value;
        res.argmax = extra.argmax;
        res.diagnostics.gradient_norm = None;
    }
    res.trace.extend(extra.trace);
    Ok(res)
}

/// Assisted lower bound for any single-mode map: the best `δ_G` of
/// `(I ⊗ φ)(ψ_p)` over `params`, evaluated in the Fock basis (or exactly
/// for Gaussian mixtures).
pub fn assisted_lower_bound(map: &MapDescriptor, params: &[InputParams], cfg: &MonotoneConfig) -> Result<MonotoneResult> {
    check_single_mode(map)?;
    if params.is_empty() {
        return Err(invalid_arg!("need at least one input"));
    }
    let mixture = gaussian_mixture(map).filter(|m| m.iter().filter(|x| x.0 > 0.0).count() <= 2);
    let mut trace = Vec::new();
    let mut max_deficit = 0.0f64;
    let mut failed = 0;
    let mut last_err = None;
    for p in params {
        let r = if let Some(parts) = &mixture {
            two_mixture_delta(&super::family::input_family_gaussian(p)?, parts, &[1]).map(|v| (v, 0.0))
        } else {
            output_state_fock_within(&map.map, p, &cfg.fock, cfg.max_cutoff).and_then(|o| Ok((delta_g(&o, &cfg.fock)?, o.trace_deficit())))
        };
        match r {
            Ok((v, d)) => {
                max_deficit = max_deficit.max(d);
                trace.push(EvalRecord { params: *p, value: v });
            }
            Err(e) => {
                failed += 1;
                last_err = Some(e);
            }
        }
    }
    let best = trace
        .iter()
        .enumerate()
        .max_by(|(i, a), (j, b)| a.value.total_cmp(&b.value).then(j.cmp(i)))
        .map(|(_, r)| *r)
        .ok_or_else(|| last_err.unwrap_or(Error::Numerical("no input could be evaluated".into())))?;
    Ok(MonotoneResult {
        kind: ResultKind::DeltaTilde,
        value: best.value,
        argmax: best.params,
        evaluations: params.len(),
        trace,
        diagnostics: Diagnostics {
            backend: if mixture.is_some() { Backend::PhaseSpace } else { Backend::Fock },
            max_deficit,
            gradient_norm: None,
            tolerance: 0.0,
            starts: params.len(),
            failed,
            n_s_reached: params.iter().map(|p| p.n_s).fold(0.0, f64::max),
            n_s_frontier: None,
        },
    })
}

/// `[S_max − H(p), S_max]` for a mixture of Gaussian unitaries with
/// probabilities `p` (lower end clamped at zero).
pub fn mixed_unitary_bounds(probabilities: &[f64], s_g_max: f64) -> Result<(f64, f64)> {
    if probabilities.is_empty()
        || probabilities.iter().any(|&p| !(0.0..=1.0).contains(&p))
        || (probabilities.iter().sum::<f64>() - 1.0).abs() > 1e-9
    {
        return Err(invalid_arg!("probabilities must form a distribution"));
    }
    if !s_g_max.is_finite() || s_g_max < 0.0 {
        return Err(invalid_arg!("S_G^max must be finite and non-negative"));
    }
    let h = linalg::entropy_bits(probabilities.iter().copied(), 0.0);
    Ok(((s_g_max - h).max(0.0), s_g_max))
}

/// Environment bound of a Gaussian-dilatable channel with sampled evidence.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GdBound {
    /// `δ_G` of the environment state.
    pub bound: f64,
    /// Largest sampled `δ_G` of `(I ⊗ φ)(ψ_p)`.
    pub sampled_max: f64,
    pub samples: Vec<EvalRecord>,
    /// `sampled_max ≤ bound + slack`.
    pub holds: bool,
    pub slack: f64,
    pub max_deficit: f64,
    /// Draws that could not be evaluated (not part of `sampled_max`).
    pub failed: usize,
}

/// Slack allowed between sampled outputs and the environment bound.
pub const GD_SLACK: f64 = 1e-3;

/// Sample ranges used by [`gd_upper_bound`].
pub const GD_SAMPLE_BOX: sample::ParamBox = sample::ParamBox { alpha_max: 1.0, r_max: 0.5, n_s_max: 1.0, complex_alpha: true };

/// `δ_G(ψ_E)` for a Gaussian-dilatable channel, checked against `samples`
/// seeded draws of the input family plus the vacuum and a TMSV.
pub fn gd_upper_bound(map: &MapDescriptor, samples: usize, cfg: &MonotoneConfig) -> Result<GdBound> {
    let MapMeta::GaussianDilatable { env } = &map.meta else {
        return Err(Error::UnsupportedMap(alloc::format!("{} carries no environment state", map.name)));
    };
    let bound = delta_g(env, &cfg.fock)?;
    let mut params = vec![InputParams::vacuum(), InputParams { n_s: 1.0, ..InputParams::vacuum() }];
    params.extend(sample::random_params_list(cfg.seed, samples, &GD_SAMPLE_BOX));
    let res = assisted_lower_bound(map, &params, cfg)?;
    let sampled_max = res.value;
    Ok(GdBound {
        bound,
        sampled_max,
        samples: res.trace,
        holds: sampled_max <= bound + GD_SLACK,
        slack: GD_SLACK,
        max_deficit: res.diagnostics.max_deficit,
        failed: res.diagnostics.failed,
    })
}

/// Growth class inferred from an energy profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Classification {
    Finite,
    Diverging,
    Inconclusive,
}

/// Which bound a profile evaluated at each energy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ProfileMethod {
    /// Assisted optimum with the input-mode energy capped.
    DeltaTilde,
    /// Unassisted bound with the input energy capped.
    DgBound,
}

/// Classification thresholds and the optimizer used at each grid point.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ProfileConfig {
    pub monotone: MonotoneConfig,
    /// Minimum slope of δ against log₂E for a diverging verdict.
    pub slope_min: f64,
    /// Maximum spread (bits) over the top half for a finite verdict.
    pub plateau_tol: f64,
    /// Start lattice of Fock-backed grid points. Energy-saturating starts
    /// are always added, and the optimum of a capped search sits near the cap.
    pub fock_lattice: Lattice,
    /// Local refinement of Fock-backed grid points.
    pub fock_nelder_mead: NelderMeadOptions,
}

impl Default for ProfileConfig {
    fn default() -> Self {
        Self {
            monotone: MonotoneConfig::default(),
            slope_min: 0.5,
            plateau_tol: 0.05,
            fock_lattice: Lattice { alpha: vec![1.0], theta: vec![0.0], r: vec![0.0], n_s: vec![0.5] },
            fock_nelder_mead: NelderMeadOptions { max_evals: 30, ftol: 1e-4, xtol: 1e-3 },
        }
    }
}

/// Energy-constrained profile of a generating-power lower bound. A
/// diagnostic: constrained values are not monotones themselves.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DivergenceProfile {
    pub map: String,
    pub method: ProfileMethod,
    pub grid: Vec<f64>,
    pub delta: Vec<f64>,
    /// Least-squares slope of δ against log₂E over the top half of the grid.
    pub slope: f64,
    /// Spread of δ over the top half of the grid.
    pub plateau_spread: f64,
    pub classification: Classification,
    pub max_deficit: f64,
    /// Largest optimizer value tolerance over the grid points.
    pub tolerance: f64,
}

/// Evaluates the best available lower bound at every energy of `grid` and
/// classifies the growth.
pub fn divergence_profile(map: &MapDescriptor, grid: &[f64], cfg: &ProfileConfig) -> Result<DivergenceProfile> {
    check_single_mode(map)?;
    if grid.len() < 4 {
        return Err(invalid_arg!("an energy profile needs at least 4 grid points"));
    }
    if grid.iter().any(|&e| !(e > 0.0 && e.is_finite())) || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid_arg!("energy grid must be positive and strictly increasing"));
    }
    let assisted = map.is_conditional_unitary() && purity_probe(map, &cfg.monotone.fock)?;
    let method = if assisted { ProfileMethod::DeltaTilde } else { ProfileMethod::DgBound };
    let mut delta = Vec::with_capacity(grid.len());
    let mut max_deficit = 0.0f64;
    let mut tolerance = 0.0f64;
    for &e in grid {
        let mc = MonotoneConfig {
            energy_cap: Some(e),
            fock_lattice: cfg.fock_lattice.clone(),
            fock_nelder_mead: cfg.fock_nelder_mead,
            ..cfg.monotone.clone()
        };
        let r = if assisted { delta_tilde(map, &mc)? } else { d_g_bound(map, &mc)? };
        max_deficit = max_deficit.max(r.diagnostics.max_deficit);
        tolerance = tolerance.max(r.diagnostics.tolerance);
        delta.push(r.value);
    }
    let (slope, spread, classification) = classify(grid, &delta, cfg.slope_min, cfg.plateau_tol);
    Ok(DivergenceProfile { map: map.name.clone(), method, grid: grid.to_vec(), delta, slope, plateau_spread: spread, classification, max_deficit, tolerance })
}

/// `(slope, spread, class)` of δ against log₂E over the top half of the grid.
pub fn classify(grid: &[f64], delta: &[f64], slope_min: f64, plateau_tol: f64) -> (f64, f64, Classification) {
    let n = grid.len();
    let top = n / 2;
    let xs: Vec<f64> = grid[top..].iter().map(|e| e.log2()).collect();
    let ys = &delta[top..];
    let m = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / m, ys.iter().sum::<f64>() / m);
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let spread = ys.iter().copied().fold(f64::NEG_INFINITY, f64::max) - ys.iter().copied().fold(f64::INFINITY, f64::min);
    let increasing = delta.windows(2).all(|w| w[1] > w[0]);
    let class = if slope >= slope_min && increasing {
        Classification::Diverging
    } else if spread <= plateau_tol {
        Classification::Finite
    } else {
        Classification::Inconclusive
    };
    (slope, spread, class)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps;

    #[test]
    fn mixed_unitary_interval() {
        let g1 = crate::gaussian::thermal_entropy(1.0).unwrap();
        let (lo, hi) = mixed_unitary_bounds(&[0.5, 0.5], 2.0 * g1).unwrap();
        assert!((lo - 3.0).abs() < 1e-12 && (hi - 4.0).abs() < 1e-12);
        assert_eq!(mixed_unitary_bounds(&[1.0], 1.3).unwrap(), (1.3, 1.3));
        assert_eq!(mixed_unitary_bounds(&[0.25; 4], 1.0).unwrap(), (0.0, 1.0));
        assert!(mixed_unitary_bounds(&[0.5, 0.6], 1.0).is_err());
    }

    #[test]
    fn classification_rules() {
        let grid = [1.0, 2.0, 4.0, 8.0];
        assert_eq!(classify(&grid, &[2.0, 2.0, 2.0, 2.0], 0.5, 0.05).2, Classification::Finite);
        assert_eq!(classify(&grid, &[1.0, 2.0, 3.0, 4.0], 0.5, 0.05).2, Classification::Diverging);
        assert_eq!(classify(&grid, &[1.0, 2.0, 2.1, 2.3], 0.5, 0.05).2, Classification::Inconclusive);
    }

    #[test]
    fn single_mode_parameters_round_trip() {
        for p in sample::random_params_list(5, 20, &sample::ParamBox::default()) {
            let s = single_mode_input(&p).unwrap();
            let q = single_mode_params(&s).unwrap();
            let s2 = single_mode_input(&q).unwrap();
            assert!(s.max_abs_diff(&s2) < 1e-9, "{p:?} {q:?}");
        }
    }

    #[test]
    fn phase_flip_on_coherent_state_matches_closed_form() {
        let cfg = MonotoneConfig::default();
        for a in [0.5f64, 1.0, 2.0] {
            let rho = GaussianState::coherent(C64::new(a, 0.0)).unwrap();
            let (v, _, b) = unassisted_value(&maps::bps(), &rho, true, &cfg).unwrap();
            assert_eq!(b, Backend::PhaseSpace);
            let n = ((4.0 * a * a + 1.0).sqrt() - 1.0) / 2.0;
            let q = (1.0 + (-2.0 * a * a).exp()) / 2.0;
            let expected = crate::gaussian::thermal_entropy(n).unwrap() - linalg::entropy_bits([q, 1.0 - q], 0.0);
            assert!((v - expected).abs() < 1e-9, "{a}: {v} vs {expected}");
        }
    }
}
