//! Catalog of conditional maps: photon subtraction and addition, the phase
//! flip channel, Kerr, coherent projection and Gaussian-dilatable channels.

use alloc::boxed::Box;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::invalid_arg;
use crate::fock::{build_state, ConditionalMap, FockArray, FockConfig, FockKind, Gate, KrausKind, KrausOp, MapBody, StateKind};
use crate::gaussian::{GaussianUnitary, SymplecticOp};
use crate::{Error, Result, C64};

/// Known growth class of a map's generating power.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum MapClass {
    Unknown,
    Finite,
    Diverging,
}

/// Closed-form facts attached to a catalog map.
#[derive(Debug, Clone, PartialEq)]
pub enum MapMeta {
    Identity,
    /// Photon subtraction `a`.
    Pns,
    /// Photon addition `a†`.
    Pna,
    /// Mixture of Gaussian unitaries with the given probabilities.
    MixedGaussian { probabilities: Vec<f64> },
    Kerr { gamma: f64 },
    CoherentProjector { alpha: C64 },
    /// Gaussian unitary on system and environment, environment traced out.
    GaussianDilatable { env: Box<FockArray> },
    Gaussian,
    Composite,
}

/// A named conditional map with its metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct MapDescriptor {
    pub name: String,
    pub map: ConditionalMap,
    pub meta: MapMeta,
    pub class: MapClass,
}

impl MapDescriptor {
    /// Structural check for maps that send pure states to pure states one-to-one.
    pub fn is_conditional_unitary(&self) -> bool {
        fn pure_preserving(m: &ConditionalMap) -> bool {
            match &m.body {
                MapBody::Unitary(_) => true,
                MapBody::Kraus(list) => {
                    list.len() == 1
                        && list[0].iter().all(|f| matches!(f.kind, KrausKind::Annihilate | KrausKind::Create))
                }
                MapBody::Mixture(list) => list.len() == 1,
                MapBody::Dilation { .. } => false,
                MapBody::Composite(list) => list.iter().all(pure_preserving),
            }
        }
        pure_preserving(&self.map)
    }

    /// `self` followed by `next`.
    pub fn then(self, next: MapDescriptor) -> MapDescriptor {
        MapDescriptor {
            name: alloc::format!("{}>{}", self.name, next.name),
            map: self.map.then(next.map),
            meta: MapMeta::Composite,
            class: MapClass::Unknown,
        }
    }
}

fn single_kraus(kind: KrausKind) -> ConditionalMap {
    ConditionalMap { n_in: 1, n_out: 1, body: MapBody::Kraus(vec![vec![KrausOp { mode: 0, kind }]]), renormalize: true }
}

pub fn identity() -> MapDescriptor {
    MapDescriptor { name: "id".into(), map: ConditionalMap::identity(1), meta: MapMeta::Identity, class: MapClass::Finite }
}

/// Photon-number subtraction: Kraus `a`, renormalized.
pub fn pns() -> MapDescriptor {
    MapDescriptor { name: "pns".into(), map: single_kraus(KrausKind::Annihilate), meta: MapMeta::Pns, class: MapClass::Finite }
}

/// Photon-number addition: Kraus `a†`, renormalized.
pub fn pna() -> MapDescriptor {
    MapDescriptor { name: "pna".into(), map: single_kraus(KrausKind::Create), meta: MapMeta::Pna, class: MapClass::Finite }
}

/// Single-mode Gaussian unitary as a map.
pub fn gaussian(kind: GaussianUnitary) -> Result<MapDescriptor> {
    if kind.arity() != 1 {
        return Err(invalid_arg!("only single-mode Gaussian unitaries are maps here"));
    }
    Ok(MapDescriptor {
        name: alloc::format!("{kind:?}"),
        map: ConditionalMap::unitary(1, Gate::gaussian(kind, &[0])),
        meta: MapMeta::Gaussian,
        class: MapClass::Finite,
    })
}

/// Single-mode Gaussian unitary given by its affine action.
pub fn gaussian_symplectic(op: SymplecticOp) -> Result<MapDescriptor> {
    if op.n_modes() != 1 {
        return Err(invalid_arg!("only single-mode Gaussian unitaries are maps here"));
    }
    Ok(MapDescriptor {
        name: "gaussian".into(),
        map: ConditionalMap::unitary(1, Gate::Symplectic { op, modes: vec![0] }),
        meta: MapMeta::Gaussian,
        class: MapClass::Finite,
    })
}

/// Phase flip channel `½ ρ + ½ R_π ρ R_π†`.
pub fn bps() -> MapDescriptor {
    let map = ConditionalMap {
        n_in: 1,
        n_out: 1,
        body: MapBody::Mixture(vec![
            (0.5, Gate::gaussian(GaussianUnitary::Rotation(0.0), &[0])),
            (0.5, Gate::gaussian(GaussianUnitary::Rotation(PI), &[0])),
        ]),
        renormalize: false,
    };
    MapDescriptor {
        name: "bps".into(),
        map,
        meta: MapMeta::MixedGaussian { probabilities: vec![0.5, 0.5] },
        class: MapClass::Diverging,
    }
}

/// Kerr strength used by classification sweeps.
pub const DEFAULT_KERR_GAMMA: f64 = 0.5;

/// Kerr unitary `exp(−iγ (a†a)²)`.
pub fn kerr(gamma: f64) -> Result<MapDescriptor> {
    if !gamma.is_finite() {
        return Err(invalid_arg!("Kerr strength must be finite"));
    }
    Ok(MapDescriptor {
        name: alloc::format!("kerr:{gamma}"),
        map: ConditionalMap::unitary(1, Gate::Kerr { gamma, mode: 0 }),
        meta: MapMeta::Kerr { gamma },
        class: MapClass::Diverging,
    })
}

/// Two-mode to one-mode map `ρ_{AA′} → ⟨α|ρ|α⟩_{A′}` (renormalized), keeping `A`.
pub fn coherent_projector(alpha: C64) -> Result<MapDescriptor> {
    if !(alpha.re.is_finite() && alpha.im.is_finite()) {
        return Err(invalid_arg!("non-finite projector amplitude"));
    }
    let map = ConditionalMap {
        n_in: 2,
        n_out: 1,
        body: MapBody::Kraus(vec![vec![KrausOp { mode: 1, kind: KrausKind::CoherentBra(alpha) }]]),
        renormalize: true,
    };
    Ok(MapDescriptor {
        name: alloc::format!("talpha:{}", alpha.re),
        map,
        meta: MapMeta::CoherentProjector { alpha },
        class: MapClass::Unknown,
    })
}

/// Channel `Tr_E[U (ρ ⊗ ψ_E) U†]` for a two-mode Gaussian unitary on
/// (system, environment) and a pure environment ket.
pub fn gaussian_dilatable(sym: SymplecticOp, env: FockArray) -> Result<MapDescriptor> {
    if sym.n_modes() != 2 {
        return Err(invalid_arg!("dilation unitary must act on system and one environment mode"));
    }
    dilation("gd".into(), Gate::Symplectic { op: sym, modes: vec![0, 1] }, env)
}

/// Beamsplitter of transmissivity `τ` with environment `env`.
pub fn beamsplitter_channel(tau: f64, env: FockArray) -> Result<MapDescriptor> {
    if !(0.0..=1.0).contains(&tau) {
        return Err(invalid_arg!("transmissivity {tau} outside [0, 1]"));
    }
    dilation(alloc::format!("gd:bs{tau}"), Gate::gaussian(GaussianUnitary::BeamSplitter(tau), &[0, 1]), env)
}

/// Pure-loss channel of transmissivity `τ` with a vacuum environment of cutoff `d`.
pub fn loss(tau: f64, d: usize) -> Result<MapDescriptor> {
    let env = build_state(StateKind::Vacuum, d, &FockConfig::default())?;
    let mut m = beamsplitter_channel(tau, env)?;
    m.name = alloc::format!("loss:{tau}");
    m.class = MapClass::Finite;
    Ok(m)
}

fn dilation(name: String, gate: Gate, env: FockArray) -> Result<MapDescriptor> {
    if env.kind() != FockKind::Ket || env.n_modes() != 1 {
        return Err(invalid_arg!("environment must be a single-mode pure ket"));
    }
    let map = ConditionalMap {
        n_in: 1,
        n_out: 1,
        body: MapBody::Dilation { env: Box::new(env.clone()), gate },
        renormalize: false,
    };
    map.validate()?;
    Ok(MapDescriptor { name, map, meta: MapMeta::GaussianDilatable { env: Box::new(env) }, class: MapClass::Finite })
}

fn radicand(alpha: C64, r: f64, n_s: f64, sign: f64) -> Result<f64> {
    if !(n_s >= 0.0) || !r.is_finite() || !alpha.re.is_finite() || !alpha.im.is_finite() {
        return Err(invalid_arg!("normalization needs finite parameters and N_S >= 0"));
    }
    let x = alpha.norm_sqr() + ((1.0 + 2.0 * n_s) * (2.0 * r).cosh() + sign) / 2.0;
    if x <= 1e-300 {
        return Err(Error::ZeroProbability(x.max(0.0)));
    }
    Ok(x)
}

/// Normalization `(|α|² + ((1+2N_S) cosh 2r − 1)/2)^{−1/2}` of a subtracted input.
pub fn normalization_pns(alpha: C64, r: f64, n_s: f64) -> Result<f64> {
    Ok(1.0 / radicand(alpha, r, n_s, -1.0)?.sqrt())
}

/// Normalization `(|α|² + ((1+2N_S) cosh 2r + 1)/2)^{−1/2}` of an added input.
pub fn normalization_pna(alpha: C64, r: f64, n_s: f64) -> Result<f64> {
    Ok(1.0 / radicand(alpha, r, n_s, 1.0)?.sqrt())
}

/// Looks up a map by its registry spec: `id`, `pns`, `pna`, `bps`,
/// `kerr[:γ]`, `talpha:α` and `gd:bs<τ>,env=<state>`.
///
/// `d` is the cutoff used for environment states.
pub fn from_spec(spec: &str, d: usize) -> Result<MapDescriptor> {
    let spec = spec.trim();
    let (name, arg) = match spec.split_once(':') {
        Some((n, a)) => (n, Some(a)),
        None => (spec, None),
    };
    let num = |a: Option<&str>| -> Result<f64> {
        let a = a.ok_or_else(|| invalid_arg!("map spec {spec:?} needs a parameter"))?;
        a.trim().parse::<f64>().map_err(|_| invalid_arg!("bad number in map spec {spec:?}"))
    };
    match name {
        "id" if arg.is_none() => Ok(identity()),
        "pns" if arg.is_none() => Ok(pns()),
        "pna" if arg.is_none() => Ok(pna()),
        "bps" if arg.is_none() => Ok(bps()),
        "kerr" => kerr(if arg.is_some() { num(arg)? } else { DEFAULT_KERR_GAMMA }),
        "talpha" | "tα" => coherent_projector(C64::new(num(arg)?, 0.0)),
        "gd" => {
            let arg = arg.ok_or_else(|| invalid_arg!("gd spec needs bs<τ>,env=<state>"))?;
            let (bs, env) = arg
                .split_once(",env=")
                .ok_or_else(|| invalid_arg!("gd spec needs bs<τ>,env=<state>"))?;
            let tau = bs
                .strip_prefix("bs")
                .ok_or_else(|| invalid_arg!("gd spec must start with bs<τ>"))?
                .parse::<f64>()
                .map_err(|_| invalid_arg!("bad transmissivity in {spec:?}"))?;
            let kind: StateKind = env.parse()?;
            if kind.n_modes() != 1 || matches!(kind, StateKind::Thermal(_)) {
                return Err(invalid_arg!("environment must be a pure single-mode state"));
            }
            let env = build_state(kind, d, &FockConfig::default())?;
            let mut m = beamsplitter_channel(tau, env)?;
            m.name = spec.to_string();
            Ok(m)
        }
        _ => Err(invalid_arg!("unknown map spec {spec:?}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{apply_map, moments, von_neumann_entropy, FockData};

    fn cfg() -> FockConfig {
        FockConfig::default()
    }

    #[test]
    fn normalization_closed_forms() {
        assert!((normalization_pna(C64::new(0.0, 0.0), 0.0, 0.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((normalization_pns(C64::new(0.0, 0.0), 0.0, 1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!(matches!(normalization_pns(C64::new(0.0, 0.0), 0.0, 0.0), Err(Error::ZeroProbability(_))));
    }

    #[test]
    fn subtraction_and_addition_on_number_states() {
        let two = build_state(StateKind::Fock(2), 6, &cfg()).unwrap();
        let out = apply_map(&two, &pns().map, &cfg()).unwrap();
        let FockData::Ket(k) = out.state.data() else { panic!() };
        assert!((k[1].norm() - 1.0).abs() < 1e-12);
        let vac = build_state(StateKind::Vacuum, 6, &cfg()).unwrap();
        let out = apply_map(&vac, &pna().map, &cfg()).unwrap();
        let FockData::Ket(k) = out.state.data() else { panic!() };
        assert!((k[1].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn phase_flip_on_coherent_state() {
        let c = build_state(StateKind::Coherent(C64::new(1.0, 0.0)), 40, &cfg()).unwrap();
        let out = apply_map(&c, &bps().map, &cfg()).unwrap();
        let s = von_neumann_entropy(&out.state, &cfg()).unwrap();
        assert!(s <= 1.0 && s > 0.5);
        let vac = build_state(StateKind::Vacuum, 10, &cfg()).unwrap();
        let out = apply_map(&vac, &bps().map, &cfg()).unwrap();
        assert!(von_neumann_entropy(&out.state.compressed(), &cfg()).unwrap() < 1e-10);
    }

    #[test]
    fn kerr_fixed_points() {
        for gamma in [0.0, 2.0 * PI] {
            let c = build_state(StateKind::Coherent(C64::new(1.0, 0.5)), 30, &cfg()).unwrap();
            let out = apply_map(&c, &kerr(gamma).unwrap().map, &cfg()).unwrap();
            let (FockData::Ket(a), FockData::Ket(b)) = (c.data(), out.state.data()) else { panic!() };
            let diff: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm()).sum();
            assert!(diff < 1e-9);
        }
    }

    #[test]
    fn registry_specs() {
        assert_eq!(from_spec("pns", 10).unwrap().name, "pns");
        assert_eq!(from_spec("kerr", 10).unwrap().meta, MapMeta::Kerr { gamma: 0.5 });
        assert!(matches!(from_spec("talpha:1", 10).unwrap().meta, MapMeta::CoherentProjector { .. }));
        let gd = from_spec("gd:bs0.5,env=fock1", 10).unwrap();
        let MapMeta::GaussianDilatable { env } = &gd.meta else { panic!() };
        assert!((moments(env).unwrap().modes[0].n.re - 1.0).abs() < 1e-12);
        assert!(from_spec("gd:bs0.5,env=thermal:1", 10).is_err());
        assert!(from_spec("nope", 10).is_err());
        assert!(pns().is_conditional_unitary() && kerr(0.5).unwrap().is_conditional_unitary());
        assert!(!bps().is_conditional_unitary() && !gd.is_conditional_unitary());
    }
}
