//! Conditional quantum maps acting on the trailing modes of a Fock state.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;
use nalgebra::DMatrix;
#[allow(unused_imports)]
use num_traits::Float;

use super::array::{coherent_amplitudes, FockArray, FockConfig, FockData};
use super::basis::{apply_local, creation_exact, ladder, norm_sqr, resize};
use super::gate::{Gate, PreparedGate};
use crate::error::invalid_arg;
use crate::{Error, Result, C64};

/// Single-mode Kraus factor, specified independently of the cutoff.
#[derive(Debug, Clone, PartialEq)]
pub enum KrausKind {
    /// `a`
    Annihilate,
    /// `a†`, which grows the mode dimension by one so nothing is lost.
    Create,
    /// Partial inner product `⟨α|` that removes the mode.
    CoherentBra(C64),
    /// Explicit `d_out × d_in` matrix.
    Matrix(DMatrix<C64>),
}

/// A Kraus factor applied to one mode (relative to the map's input modes).
#[derive(Debug, Clone, PartialEq)]
pub struct KrausOp {
    pub mode: usize,
    pub kind: KrausKind,
}

/// Body of a conditional map.
#[derive(Debug, Clone, PartialEq)]
pub enum MapBody {
    Unitary(Gate),
    /// Kraus operators, each a product of single-mode factors written left to
    /// right (the last factor acts first).
    Kraus(Vec<Vec<KrausOp>>),
    /// `Σ p_k U_k ρ U_k†`.
    Mixture(Vec<(f64, Gate)>),
    /// `Tr_E[U (ρ ⊗ ψ_E) U†]`; the environment modes follow the input modes.
    Dilation { env: Box<FockArray>, gate: Gate },
    /// Applied left to right.
    Composite(Vec<ConditionalMap>),
}

/// `φ(ρ) = T(ρ)/Tr T(ρ)` when `renormalize`, else the CP map `T` itself.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalMap {
    pub n_in: usize,
    pub n_out: usize,
    pub body: MapBody,
    pub renormalize: bool,
}

/// Result of [`apply_map`].
#[derive(Debug, Clone)]
pub struct MapOutput {
    pub state: FockArray,
    /// `Tr T(ρ) / Tr ρ`.
    pub success_probability: f64,
}

impl ConditionalMap {
    pub fn identity(n: usize) -> Self {
        Self { n_in: n, n_out: n, body: MapBody::Composite(vec![]), renormalize: false }
    }

    pub fn unitary(n: usize, gate: Gate) -> Self {
        Self { n_in: n, n_out: n, body: MapBody::Unitary(gate), renormalize: false }
    }

    /// Validates the mode signature and the body.
    pub fn validate(&self) -> Result<()> {
        match &self.body {
            MapBody::Unitary(g) => {
                check_modes(&g.modes(), self.n_in)?;
                same_io(self)
            }
            MapBody::Kraus(list) => {
                if list.is_empty() || list.iter().any(|k| k.is_empty()) {
                    return Err(invalid_arg!("Kraus list must be nonempty"));
                }
                let mut outs = None;
                for k in list {
                    let mut n = self.n_in;
                    for f in k {
                        if f.mode >= n {
                            return Err(invalid_arg!("Kraus factor mode {} out of range", f.mode));
                        }
                        if matches!(f.kind, KrausKind::CoherentBra(_)) {
                            n -= 1;
                        }
                    }
                    if *outs.get_or_insert(n) != n {
                        return Err(invalid_arg!("Kraus operators disagree on output modes"));
                    }
                }
                if outs != Some(self.n_out) || self.n_out == 0 {
                    return Err(invalid_arg!("Kraus operators produce {outs:?} modes, declared {}", self.n_out));
                }
                Ok(())
            }
            MapBody::Mixture(list) => {
                if list.is_empty() {
                    return Err(invalid_arg!("mixture must be nonempty"));
                }
                let total: f64 = list.iter().map(|t| t.0).sum();
                if list.iter().any(|t| !(t.0 >= 0.0)) || (total - 1.0).abs() > 1e-12 {
                    return Err(invalid_arg!("mixture probabilities must be a distribution (sum {total})"));
                }
                for (_, g) in list {
                    check_modes(&g.modes(), self.n_in)?;
                }
                same_io(self)
            }
            MapBody::Dilation { env, gate } => {
                if env.kind() != super::FockKind::Ket {
                    return Err(invalid_arg!("dilation environment must be a pure ket"));
                }
                check_modes(&gate.modes(), self.n_in + env.n_modes())?;
                same_io(self)
            }
            MapBody::Composite(list) => {
                let mut n = self.n_in;
                for m in list {
                    m.validate()?;
                    if m.n_in != n {
                        return Err(invalid_arg!("composite stage expects {} modes, got {n}", m.n_in));
                    }
                    n = m.n_out;
                }
                if n != self.n_out {
                    return Err(invalid_arg!("composite map ends with {n} modes, declared {}", self.n_out));
                }
                Ok(())
            }
        }
    }

    /// Whether any stage post-selects.
    pub fn renormalizes(&self) -> bool {
        self.renormalize
            || matches!(&self.body, MapBody::Composite(list) if list.iter().any(|m| m.renormalizes()))
    }

    /// `self` followed by `next`.
    pub fn then(self, next: ConditionalMap) -> ConditionalMap {
        let (n_in, n_out) = (self.n_in, next.n_out);
        let renormalize = self.renormalizes() || next.renormalizes();
        ConditionalMap { n_in, n_out, body: MapBody::Composite(vec![self, next]), renormalize }
    }
}

fn check_modes(modes: &[usize], n: usize) -> Result<()> {
    if modes.iter().any(|&m| m >= n) {
        return Err(invalid_arg!("gate mode out of range for a {n}-mode map"));
    }
    Ok(())
}

fn same_io(m: &ConditionalMap) -> Result<()> {
    if m.n_in != m.n_out || m.n_in == 0 {
        return Err(invalid_arg!("map must keep its mode count"));
    }
    Ok(())
}

/// Working set of unnormalized kets sharing per-mode dimensions.
struct Ensemble {
    dims: Vec<usize>,
    kets: Vec<Vec<C64>>,
    lost: f64,
}

impl Ensemble {
    fn trace(&self) -> f64 {
        self.kets.iter().map(|k| norm_sqr(k)).sum()
    }

    fn apply_gate(&mut self, gate: &Gate) -> Result<()> {
        let prepared: PreparedGate = gate.prepare(&self.dims)?;
        for k in &mut self.kets {
            let (out, lost) = prepared.apply(k);
            *k = out;
            self.lost += lost;
        }
        Ok(())
    }

    fn apply_factor(&mut self, mode: usize, kind: &KrausKind, d_bra: &mut f64) -> Result<()> {
        let d = self.dims[mode];
        let m = match kind {
            KrausKind::Annihilate => ladder(d.max(2))?.view((0, 0), (d, d)).into_owned(),
            KrausKind::Create => creation_exact(d),
            KrausKind::CoherentBra(alpha) => {
                let amps = coherent_amplitudes(*alpha, d);
                *d_bra = d_bra.max((1.0 - norm_sqr(&amps)).max(0.0));
                DMatrix::from_fn(1, d, |_, n| amps[n].conj())
            }
            KrausKind::Matrix(m) => {
                if m.ncols() != d {
                    return Err(invalid_arg!("Kraus matrix has {} columns, mode dimension is {d}", m.ncols()));
                }
                m.clone()
            }
        };
        for k in &mut self.kets {
            *k = apply_local(k, &self.dims, mode, &m);
        }
        if matches!(kind, KrausKind::CoherentBra(_)) {
            self.dims.remove(mode);
        } else {
            self.dims[mode] = m.nrows();
        }
        Ok(())
    }
}

/// Applies `map` to the last `map.n_in` modes of `rho` (identity on the rest).
///
/// Fails with [`Error::ZeroProbability`] when `Tr T(ρ) ≤ 1e-14` and with
/// [`Error::Truncation`] when the accumulated deficit exceeds `cfg.op_tol`.
pub fn apply_map(rho: &FockArray, map: &ConditionalMap, cfg: &FockConfig) -> Result<MapOutput> {
    map.validate()?;
    if map.n_in > rho.n_modes() {
        return Err(invalid_arg!("map acts on {} modes, state has {}", map.n_in, rho.n_modes()));
    }
    let t_in = rho.trace();
    if !(t_in > 0.0) {
        return Err(Error::ZeroProbability(t_in));
    }
    let mut ens = Ensemble { dims: rho.dims().to_vec(), kets: rho.kets(), lost: 0.0 };
    let offset = rho.n_modes() - map.n_in;
    let mut bra_deficit = 0.0;
    run(&mut ens, map, offset, &mut bra_deficit)?;
    ens.kets.retain(|k| norm_sqr(k) > 0.0);
    let t_out = ens.trace();
    let p = t_out / t_in;
    if map.renormalizes() && !(t_out > 1e-14 * t_in.max(1.0)) {
        return Err(Error::ZeroProbability(p));
    }
    if ens.kets.is_empty() {
        return Err(Error::ZeroProbability(0.0));
    }
    let op_loss = ens.lost / t_in + bra_deficit;
    let deficit;
    let scale;
    if map.renormalizes() {
        deficit = rho.trace_deficit() + op_loss / p.max(1e-300);
        scale = 1.0 / t_out.sqrt();
    } else {
        deficit = rho.trace_deficit() + op_loss;
        scale = 1.0;
    }
    if op_loss > cfg.op_tol {
        let d = ens.dims.iter().copied().max().unwrap_or(2);
        return Err(Error::Truncation { deficit: op_loss, bound: cfg.op_tol, suggested_cutoff: d + d / 2 });
    }
    let mut kets = ens.kets;
    if scale != 1.0 {
        kets.iter_mut().for_each(|k| k.iter_mut().for_each(|z| *z *= scale));
    }
    let data = if kets.len() == 1 {
        FockData::Ket(kets.pop().unwrap_or_default())
    } else {
        FockData::Mixture(kets)
    };
    Ok(MapOutput { state: FockArray::with_deficit(ens.dims, data, deficit.min(1.0)), success_probability: p })
}

fn run(ens: &mut Ensemble, map: &ConditionalMap, offset: usize, bra_deficit: &mut f64) -> Result<()> {
    match &map.body {
        MapBody::Unitary(g) => ens.apply_gate(&g.shifted(offset)),
        MapBody::Kraus(list) => {
            let input = core::mem::take(&mut ens.kets);
            let dims_in = ens.dims.clone();
            let mut out = Vec::new();
            let mut dims_out = dims_in.clone();
            for factors in list {
                let mut branch = Ensemble { dims: dims_in.clone(), kets: input.clone(), lost: 0.0 };
                for f in factors.iter().rev() {
                    branch.apply_factor(offset + f.mode, &f.kind, bra_deficit)?;
                }
                dims_out = branch.dims;
                out.extend(branch.kets);
            }
            ens.dims = dims_out;
            ens.kets = out;
            Ok(())
        }
        MapBody::Mixture(list) => {
            let input = core::mem::take(&mut ens.kets);
            let mut out = Vec::new();
            for (p, g) in list {
                if *p == 0.0 {
                    continue;
                }
                let mut branch = Ensemble { dims: ens.dims.clone(), kets: input.clone(), lost: 0.0 };
                branch.apply_gate(&g.shifted(offset))?;
                let s = p.sqrt();
                out.extend(branch.kets.into_iter().map(|k| k.into_iter().map(|z| z * s).collect::<Vec<_>>()));
                ens.lost += p * branch.lost;
            }
            ens.kets = out;
            Ok(())
        }
        MapBody::Dilation { env, gate } => {
            let FockData::Ket(e) = env.data() else {
                return Err(invalid_arg!("dilation environment must be a pure ket"));
            };
            let n_sys = ens.dims.len();
            let mut env_dims = env.dims().to_vec();
            let mut e = e.clone();
            if env_dims.len() == 1 {
                // Size the environment by its support plus the largest system
                // mode it couples to: exact for number-conserving gates, and
                // any other gate reports what it pushes out.
                let support = e.iter().rposition(|z| z.norm_sqr() > 0.0).map_or(1, |i| i + 1);
                let sys = gate.modes().iter().filter(|&&m| m < map.n_in).map(|&m| ens.dims[offset + m]).max().unwrap_or(1);
                let work = [support + sys];
                e = resize(&e, &env_dims, &work).0;
                env_dims = work.to_vec();
            }
            ens.kets = ens.kets.iter().map(|k| super::array::kron(k, &e)).collect();
            ens.dims.extend_from_slice(&env_dims);
            ens.lost += env.trace_deficit() * ens.trace();
            ens.apply_gate(&gate.shifted(offset))?;
            // trace out the environment: one member per environment basis state
            let de: usize = env_dims.iter().product();
            let mut out = Vec::new();
            for k in &ens.kets {
                for b in 0..de {
                    let member: Vec<C64> = k.iter().skip(b).step_by(de).copied().collect();
                    if norm_sqr(&member) > 1e-30 {
                        out.push(member);
                    }
                }
            }
            ens.kets = out;
            ens.dims.truncate(n_sys);
            Ok(())
        }
        MapBody::Composite(list) => {
            for m in list {
                run(ens, m, ens.dims.len() - m.n_in, bra_deficit)?;
            }
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{build_state, moments, StateKind};
    use crate::gaussian::GaussianUnitary;

    fn cfg() -> FockConfig {
        FockConfig::default()
    }

    fn kraus(kind: KrausKind) -> ConditionalMap {
        ConditionalMap { n_in: 1, n_out: 1, body: MapBody::Kraus(vec![vec![KrausOp { mode: 0, kind }]]), renormalize: true }
    }

    #[test]
    fn subtraction_and_addition_on_fock_states() {
        let one = build_state(StateKind::Fock(1), 6, &cfg()).unwrap();
        let out = apply_map(&one, &kraus(KrausKind::Annihilate), &cfg()).unwrap();
        assert!((out.success_probability - 1.0).abs() < 1e-12);
        assert!(moments(&out.state).unwrap().modes[0].n.re.abs() < 1e-12);
        let vac = build_state(StateKind::Vacuum, 6, &cfg()).unwrap();
        let out = apply_map(&vac, &kraus(KrausKind::Create), &cfg()).unwrap();
        assert_eq!(out.state.dims(), &[7]);
        assert!((moments(&out.state).unwrap().modes[0].n.re - 1.0).abs() < 1e-12);
        assert!(matches!(apply_map(&vac, &kraus(KrausKind::Annihilate), &cfg()), Err(Error::ZeroProbability(_))));
    }

    #[test]
    fn subtraction_on_tmsv_acts_on_trailing_mode() {
        let t = build_state(StateKind::Tmsv(1.0), 40, &cfg()).unwrap();
        let out = apply_map(&t, &kraus(KrausKind::Annihilate), &cfg()).unwrap();
        assert!((out.success_probability - 1.0).abs() < 1e-9);
        // a_B|ζ⟩ ∝ Σ λⁿ √n |n⟩|n−1⟩: kept mode photon number 2N+1 = 3 for N=1
        let m = moments(&out.state).unwrap();
        assert!((m.modes[0].n.re - 3.0).abs() < 1e-6);
        assert!((m.modes[1].n.re - 2.0).abs() < 1e-6);
    }

    #[test]
    fn phase_flip_mixture_is_trace_preserving() {
        let map = ConditionalMap {
            n_in: 1,
            n_out: 1,
            body: MapBody::Mixture(vec![
                (0.5, Gate::gaussian(GaussianUnitary::Rotation(0.0), &[0])),
                (0.5, Gate::gaussian(GaussianUnitary::Rotation(core::f64::consts::PI), &[0])),
            ]),
            renormalize: false,
        };
        let c = build_state(StateKind::Coherent(C64::new(1.5, 0.0)), 40, &cfg()).unwrap();
        let out = apply_map(&c, &map, &cfg()).unwrap();
        assert!((out.state.trace() - c.trace()).abs() < 1e-12);
        assert!(moments(&out.state).unwrap().modes[0].a.norm() < 1e-12);
    }

    #[test]
    fn beamsplitter_with_single_photon_environment() {
        let env = build_state(StateKind::Fock(1), 12, &cfg()).unwrap();
        let map = ConditionalMap {
            n_in: 1,
            n_out: 1,
            body: MapBody::Dilation { env: Box::new(env), gate: Gate::gaussian(GaussianUnitary::BeamSplitter(0.5), &[0, 1]) },
            renormalize: false,
        };
        let vac = build_state(StateKind::Vacuum, 12, &cfg()).unwrap();
        let out = apply_map(&vac, &map, &cfg()).unwrap();
        let rho = out.state.to_density();
        assert!((rho[(0, 0)].re - 0.5).abs() < 1e-10);
        assert!((rho[(1, 1)].re - 0.5).abs() < 1e-10);
        assert!(rho[(0, 1)].norm() < 1e-10);
    }

    #[test]
    fn coherent_projection_removes_mode() {
        let beta = build_state(StateKind::Coherent(C64::new(0.4, 0.1)), 20, &cfg()).unwrap();
        let alpha = build_state(StateKind::Coherent(C64::new(1.0, 0.0)), 20, &cfg()).unwrap();
        let map = ConditionalMap {
            n_in: 2,
            n_out: 1,
            body: MapBody::Kraus(vec![vec![KrausOp { mode: 1, kind: KrausKind::CoherentBra(C64::new(1.0, 0.0)) }]]),
            renormalize: true,
        };
        let out = apply_map(&beta.tensor(&alpha), &map, &cfg()).unwrap();
        assert_eq!(out.state.dims(), &[20]);
        let FockData::Ket(k) = out.state.data() else { panic!() };
        let FockData::Ket(b) = beta.data() else { panic!() };
        let ov: C64 = k.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
        assert!((ov.norm() - 1.0).abs() < 1e-9);
    }
}
