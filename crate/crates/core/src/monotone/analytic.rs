//! Closed-form outputs of photon subtraction and addition on the input family.
//!
//! For `|ψ⟩ = U_T |ζ⟩` with `T` Gaussian on mode B, `a_B |ψ⟩ = U_T K |ζ⟩`
//! where `K = U_T† a_B U_T = β + u a_B + v a_B†` is read off the affine
//! action. The moments of `K|ζ⟩` are TMSV expectations of words of length at
//! most four, so the Gaussified output follows exactly from moment factoring.

use alloc::vec;
use alloc::vec::Vec;

use super::family::InputParams;
use super::wick::{tmsv_wick_expectation, TmsvMode, WickSymbol};
use crate::fock::{covariance_from_moments, ConditionalMap, Gate, KrausKind, MapBody, ModeMoments, MomentRecord, PairMoments};
use crate::gaussian::{gaussian_entropy, GaussianState, SymplecticOp};
use crate::maps::MapDescriptor;
use crate::{Error, Result, C64};

/// Non-Gaussian pivot of an analytically tractable map.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Which {
    Pns,
    Pna,
}

/// A single-mode map `post ∘ pivot ∘ pre` with Gaussian unitaries `pre`,
/// `post` and at most one subtraction or addition.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticForm {
    pub pre: SymplecticOp,
    pub pivot: Option<Which>,
    pub post: SymplecticOp,
}

impl AnalyticForm {
    /// Recognizes maps built from single-mode Gaussian gates and one
    /// subtraction or addition; `None` for anything else.
    pub fn extract(map: &MapDescriptor) -> Option<Self> {
        if map.map.n_in != 1 || map.map.n_out != 1 {
            return None;
        }
        let mut form = Self { pre: SymplecticOp::identity(1), pivot: None, post: SymplecticOp::identity(1) };
        form.absorb(&map.map).then_some(form)
    }

    fn absorb(&mut self, m: &ConditionalMap) -> bool {
        if m.n_in != 1 || m.n_out != 1 {
            return false;
        }
        match &m.body {
            MapBody::Unitary(g) => self.absorb_gate(g),
            MapBody::Mixture(list) if list.len() == 1 => self.absorb_gate(&list[0].1),
            MapBody::Kraus(list) if list.len() == 1 && list[0].len() == 1 && self.pivot.is_none() => {
                match list[0][0].kind {
                    KrausKind::Annihilate => self.pivot = Some(Which::Pns),
                    KrausKind::Create => self.pivot = Some(Which::Pna),
                    _ => return false,
                }
                true
            }
            MapBody::Composite(list) => list.iter().all(|s| self.absorb(s)),
            _ => false,
        }
    }

    fn absorb_gate(&mut self, g: &Gate) -> bool {
        let Ok(Some(op)) = g.to_symplectic(1) else {
            return false;
        };
        let slot = if self.pivot.is_some() { &mut self.post } else { &mut self.pre };
        match slot.then(&op) {
            Ok(next) => {
                *slot = next;
                true
            }
            Err(_) => false,
        }
    }
}

/// Gaussified `(I ⊗ φ)(ψ_p)` for `φ = pns` or `pna`, mode 0 the ancilla.
pub fn analytic_output_covariance(p: &InputParams, which: Which) -> Result<GaussianState> {
    analytic_output(p, &AnalyticForm { pre: SymplecticOp::identity(1), pivot: Some(which), post: SymplecticOp::identity(1) })
}

/// Gaussified output of `map` on `ψ_p` when the map has an [`AnalyticForm`].
pub fn analytic_output_for_map(p: &InputParams, map: &MapDescriptor) -> Result<GaussianState> {
    let form = AnalyticForm::extract(map).ok_or(Error::UnsupportedMap(map.name.clone()))?;
    analytic_output(p, &form)
}

/// Gaussified output for an explicit [`AnalyticForm`].
pub fn analytic_output(p: &InputParams, form: &AnalyticForm) -> Result<GaussianState> {
    let (core, t2, post2) = pivot_frame(p, form)?;
    core.apply(&t2)?.apply(&post2)
}

/// Entropy (bits) of the Gaussified output.
///
/// Evaluated before the Gaussian unitaries are reapplied: the entropy is
/// invariant under them and the unrotated moments stay well conditioned
/// for strongly squeezed inputs.
pub fn analytic_entropy(p: &InputParams, form: &AnalyticForm) -> Result<f64> {
    gaussian_entropy(&pivot_frame(p, form)?.0)
}

/// Gaussified `K|ζ⟩` together with the Gaussian unitaries (on two modes)
/// that map it to the output.
fn pivot_frame(p: &InputParams, form: &AnalyticForm) -> Result<(GaussianState, SymplecticOp, SymplecticOp)> {
    p.check()?;
    let t = p.local_op()?.then(&form.pre)?;
    let t2 = t.embed(2, &[1])?;
    let post2 = form.post.embed(2, &[1])?;
    let Some(which) = form.pivot else {
        return Ok((GaussianState::tmsv(p.n_s)?, t2, post2));
    };
    let s = t.matrix();
    let d = t.displacement();
    let u = C64::new((s[(0, 0)] + s[(1, 1)]) / 2.0, (s[(1, 0)] - s[(0, 1)]) / 2.0);
    let v = C64::new((s[(0, 0)] - s[(1, 1)]) / 2.0, (s[(1, 0)] + s[(0, 1)]) / 2.0);
    let beta = C64::new(d[0] / 2.0, d[1] / 2.0);
    // the overall scale of K drops out after normalization
    let scale = beta.norm().max(u.norm()).max(v.norm());
    let (u, v, beta) = (u / scale, v / scale, beta / scale);
    let b = |dag| Some(WickSymbol::new(TmsvMode::B, dag));
    let k: [(C64, Option<WickSymbol>); 3] = match which {
        Which::Pns => [(beta, None), (u, b(false)), (v, b(true))],
        Which::Pna => [(beta.conj(), None), (v.conj(), b(false)), (u.conj(), b(true))],
    };
    let mean = |x: &[WickSymbol]| -> Result<C64> {
        let mut acc = C64::new(0.0, 0.0);
        for (ci, si) in &k {
            for (cj, sj) in &k {
                let c = ci.conj() * cj;
                if c.norm() == 0.0 {
                    continue;
                }
                let mut w: Vec<WickSymbol> = Vec::with_capacity(x.len() + 2);
                w.extend(si.map(WickSymbol::adjoint));
                w.extend_from_slice(x);
                w.extend(*sj);
                acc += c * tmsv_wick_expectation(&w, p.n_s)?;
            }
        }
        Ok(acc)
    };
    let norm = mean(&[])?.re;
    if !(norm > 1e-300) {
        return Err(Error::ZeroProbability(norm.max(0.0)));
    }
    let e = |x: &[WickSymbol]| -> Result<C64> { Ok(mean(x)? / norm) };
    let sym = |mode, dag| WickSymbol::new(mode, dag);
    let mode = |m: TmsvMode| -> Result<ModeMoments> {
        Ok(ModeMoments {
            a: e(&[sym(m, false)])?,
            a2: e(&[sym(m, false), sym(m, false)])?,
            n: e(&[sym(m, true), sym(m, false)])?,
        })
    };
    let record = MomentRecord {
        modes: vec![mode(TmsvMode::A)?, mode(TmsvMode::B)?],
        pairs: vec![PairMoments {
            j: 0,
            k: 1,
            ab: e(&[sym(TmsvMode::A, false), sym(TmsvMode::B, false)])?,
            adag_b: e(&[sym(TmsvMode::A, true), sym(TmsvMode::B, false)])?,
        }],
    };
    Ok((covariance_from_moments(&record)?, t2, post2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps;

    #[test]
    fn addition_on_vacuum_gives_single_photon() {
        let g = analytic_output_covariance(&InputParams::vacuum(), Which::Pna).unwrap();
        let expected = nalgebra::DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 1.0, 3.0, 3.0]));
        assert!((g.cov() - expected).amax() < 1e-12);
        assert!(g.mean().amax() < 1e-12);
        assert!((gaussian_entropy(&g).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn subtraction_on_vacuum_has_zero_probability() {
        assert!(matches!(analytic_output_covariance(&InputParams::vacuum(), Which::Pns), Err(Error::ZeroProbability(_))));
    }

    #[test]
    fn flat_optimum_at_zero_displacement() {
        for (theta, r, n_s) in [(0.0, 0.0, 1.0), (0.7, 0.4, 0.3), (2.0, -0.6, 2.0)] {
            let p = InputParams::new(C64::new(0.0, 0.0), theta, r, n_s).unwrap();
            for which in [Which::Pns, Which::Pna] {
                let s = gaussian_entropy(&analytic_output_covariance(&p, which).unwrap()).unwrap();
                assert!((s - 2.0).abs() < 1e-9, "{which:?} {s}");
            }
        }
    }

    #[test]
    fn extraction_of_composites() {
        let sq = maps::gaussian(crate::gaussian::GaussianUnitary::Squeeze(0.3)).unwrap();
        let m = sq.clone().then(maps::pns()).then(sq);
        let f = AnalyticForm::extract(&m).unwrap();
        assert_eq!(f.pivot, Some(Which::Pns));
        assert!(f.pre.matrix()[(0, 0)] < 1.0 && f.post.matrix()[(0, 0)] < 1.0);
        assert!(AnalyticForm::extract(&maps::pns().then(maps::pna())).is_none());
        assert!(AnalyticForm::extract(&maps::kerr(0.5).unwrap()).is_none());
        assert_eq!(AnalyticForm::extract(&maps::identity()).unwrap().pivot, None);
    }
}
