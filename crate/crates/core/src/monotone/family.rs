//! The four-parameter family of pure Gaussian inputs.

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::invalid_arg;
use crate::fock::{apply_map, build_state, ConditionalMap, FockArray, FockConfig, Gate, StateKind};
use crate::gaussian::{gaussian_unitary, GaussianState, GaussianUnitary, SymplecticOp};
use crate::{Error, Result, C64};

/// `|ψ⟩ = D_α R_θ S_r |ζ⟩` with `N_S` photons per TMSV mode.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct InputParams {
    pub alpha: C64,
    pub theta: f64,
    pub r: f64,
    pub n_s: f64,
}

impl InputParams {
    pub fn new(alpha: C64, theta: f64, r: f64, n_s: f64) -> Result<Self> {
        let p = Self { alpha, theta, r, n_s };
        p.check()?;
        Ok(p)
    }

    pub fn vacuum() -> Self {
        Self { alpha: C64::new(0.0, 0.0), theta: 0.0, r: 0.0, n_s: 0.0 }
    }

    pub fn check(&self) -> Result<()> {
        let finite = self.alpha.re.is_finite() && self.alpha.im.is_finite() && self.theta.is_finite() && self.r.is_finite();
        if !finite || !(self.n_s >= 0.0 && self.n_s.is_finite()) {
            return Err(invalid_arg!("input parameters must be finite with N_S >= 0"));
        }
        Ok(())
    }

    /// Mean photon number of the map's input mode,
    /// `|α|² + ((2N_S+1) cosh 2r − 1)/2`.
    pub fn energy(&self) -> f64 {
        self.alpha.norm_sqr() + ((2.0 * self.n_s + 1.0) * (2.0 * self.r).cosh() - 1.0) / 2.0
    }

    /// Single-mode action `S_r`, then `R_θ`, then `D_α`.
    pub fn local_op(&self) -> Result<SymplecticOp> {
        gaussian_unitary(GaussianUnitary::Squeeze(self.r), 1, &[0])?
            .then(&gaussian_unitary(GaussianUnitary::Rotation(self.theta), 1, &[0])?)?
            .then(&gaussian_unitary(GaussianUnitary::Displacement(self.alpha), 1, &[0])?)
    }
}

/// Phase-space representation of the input (ancilla mode 0, input mode 1).
pub fn input_family_gaussian(p: &InputParams) -> Result<GaussianState> {
    p.check()?;
    GaussianState::tmsv(p.n_s)?.apply(&p.local_op()?.embed(2, &[1])?)
}

fn thermal_cutoff(n: f64, tol: f64) -> usize {
    if n <= 0.0 {
        return 8;
    }
    let d = (tol.ln() / (n / (n + 1.0)).ln()).ceil();
    (d as usize).max(8) + 2
}

/// Per-mode cutoffs `[ancilla, input]` expected to keep the truncation
/// deficit of the input family below `tol`.
pub fn fock_cutoffs(p: &InputParams, tol: f64) -> [usize; 2] {
    let d_a = thermal_cutoff(p.n_s, tol * 0.1);
    let v_max = (2.0 * p.n_s + 1.0) * (2.0 * p.r.abs()).exp();
    let n_eff = (v_max - 1.0) / 2.0;
    let a = p.alpha.norm();
    let d_b = thermal_cutoff(n_eff, tol * 0.1) + (a * a + 8.0 * a * (n_eff + 1.0).sqrt()).ceil() as usize;
    [d_a, d_b.max(d_a)]
}

/// Largest per-mode cutoff tried by the automatic cutoff search.
pub const MAX_AUTO_CUTOFF: usize = 400;

/// Fock representation with automatically chosen cutoffs, retried on
/// truncation failures up to [`MAX_AUTO_CUTOFF`].
pub fn input_family_fock(p: &InputParams, cfg: &FockConfig) -> Result<FockArray> {
    with_auto_cutoffs(p, cfg, MAX_AUTO_CUTOFF, |dims| input_family_fock_with(p, dims, cfg))
}

/// `(I ⊗ φ)(ψ_p)` in the Fock basis, with automatic cutoffs up to [`MAX_AUTO_CUTOFF`].
pub fn output_state_fock(map: &ConditionalMap, p: &InputParams, cfg: &FockConfig) -> Result<FockArray> {
    output_state_fock_within(map, p, cfg, MAX_AUTO_CUTOFF)
}

/// As [`output_state_fock`] with a per-mode cutoff budget; inputs that need
/// more fail with a truncation error without being simulated.
pub fn output_state_fock_within(map: &ConditionalMap, p: &InputParams, cfg: &FockConfig, max_cutoff: usize) -> Result<FockArray> {
    with_auto_cutoffs(p, cfg, max_cutoff, |dims| {
        input_family_fock_with(p, dims, cfg).and_then(|s| apply_map(&s, map, cfg).map(|o| o.state))
    })
}

fn with_auto_cutoffs<T>(p: &InputParams, cfg: &FockConfig, max_cutoff: usize, mut f: impl FnMut([usize; 2]) -> Result<T>) -> Result<T> {
    p.check()?;
    let mut dims = fock_cutoffs(p, cfg.op_tol.min(cfg.build_tol * 100.0));
    loop {
        if dims[1] > max_cutoff {
            return Err(Error::Truncation { deficit: f64::NAN, bound: cfg.op_tol, suggested_cutoff: dims[1] });
        }
        match f(dims) {
            Err(Error::Truncation { deficit, bound, suggested_cutoff }) => {
                if dims[1] >= max_cutoff {
                    return Err(Error::Truncation { deficit, bound, suggested_cutoff });
                }
                dims = [(dims[0] * 3 / 2).min(max_cutoff), (dims[1] * 3 / 2).min(max_cutoff)];
            }
            other => return other,
        }
    }
}

/// Fock representation with explicit cutoffs `[ancilla, input]`.
pub fn input_family_fock_with(p: &InputParams, dims: [usize; 2], cfg: &FockConfig) -> Result<FockArray> {
    let [d_a, d_b] = dims;
    if d_b < d_a {
        return Err(invalid_arg!("input-mode cutoff must be at least the ancilla cutoff"));
    }
    let tmsv = build_state(StateKind::Tmsv(p.n_s), d_a, cfg)?;
    let crate::fock::FockData::Ket(k) = tmsv.data() else {
        return Err(Error::Numerical("TMSV builder returned a mixed state".into()));
    };
    let (k, _) = crate::fock::resize_ket(k, &[d_a, d_a], &[d_a, d_b]);
    let mut state = FockArray::from_ket(&[d_a, d_b], k)?;
    let gates = [
        Gate::gaussian(GaussianUnitary::Squeeze(p.r), &[1]),
        Gate::gaussian(GaussianUnitary::Rotation(p.theta), &[1]),
        Gate::gaussian(GaussianUnitary::Displacement(p.alpha), &[1]),
    ];
    for g in gates {
        let skip = match g {
            Gate::Gaussian { kind: GaussianUnitary::Squeeze(r), .. } | Gate::Gaussian { kind: GaussianUnitary::Rotation(r), .. } => r == 0.0,
            Gate::Gaussian { kind: GaussianUnitary::Displacement(a), .. } => a.norm() == 0.0,
            _ => false,
        };
        if skip {
            continue;
        }
        state = apply_map(&state, &ConditionalMap::unitary(2, g), cfg)?.state;
    }
    Ok(state)
}

