//! First and second ladder moments and the covariance they determine.

use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector};

use super::array::{FockArray, FockData};
use super::basis::{density_expectation, ket_expectation, Ladder};
use crate::error::invalid_arg;
use crate::gaussian::GaussianState;
use crate::{Error, Result, C64};

/// Moments of one mode.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ModeMoments {
    /// `⟨a⟩`
    pub a: C64,
    /// `⟨a²⟩`
    pub a2: C64,
    /// `⟨a†a⟩`
    pub n: C64,
}

/// Cross moments of modes `j < k`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PairMoments {
    pub j: usize,
    pub k: usize,
    /// `⟨a_j a_k⟩`
    pub ab: C64,
    /// `⟨a_j† a_k⟩`
    pub adag_b: C64,
}

/// Every first and second moment needed to reconstruct mean and covariance.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MomentRecord {
    pub modes: Vec<ModeMoments>,
    pub pairs: Vec<PairMoments>,
}

impl MomentRecord {
    pub fn n_modes(&self) -> usize {
        self.modes.len()
    }

    /// Cross moments of `(j, k)` for `j < k`.
    pub fn pair(&self, j: usize, k: usize) -> Option<&PairMoments> {
        self.pairs.iter().find(|p| p.j == j && p.k == k)
    }
}

/// Normalized expectation values of the ladder words in `words`.
pub fn expectations(rho: &FockArray, words: &[&[Ladder]]) -> Result<Vec<C64>> {
    let t = rho.trace();
    if !(t > 0.0) {
        return Err(Error::ZeroProbability(t));
    }
    let dims = rho.dims();
    let out = words
        .iter()
        .map(|w| {
            let raw = match rho.data() {
                FockData::Ket(k) => ket_expectation(k, dims, w),
                FockData::Density(r) => density_expectation(r, dims, w),
                FockData::Mixture(ks) => ks.iter().map(|k| ket_expectation(k, dims, w)).sum(),
            };
            raw / t
        })
        .collect();
    Ok(out)
}

/// First and second moments of every mode and every mode pair.
///
/// All words are normally ordered, so truncation does not bias them beyond
/// the stored state's own deficit.
pub fn moments(rho: &FockArray) -> Result<MomentRecord> {
    let n = rho.n_modes();
    let mut words: Vec<Vec<Ladder>> = Vec::new();
    for j in 0..n {
        words.push(alloc::vec![Ladder::a(j)]);
        words.push(alloc::vec![Ladder::a(j), Ladder::a(j)]);
        words.push(alloc::vec![Ladder::adag(j), Ladder::a(j)]);
    }
    for j in 0..n {
        for k in j + 1..n {
            words.push(alloc::vec![Ladder::a(j), Ladder::a(k)]);
            words.push(alloc::vec![Ladder::adag(j), Ladder::a(k)]);
        }
    }
    let refs: Vec<&[Ladder]> = words.iter().map(|w| w.as_slice()).collect();
    let vals = expectations(rho, &refs)?;
    let modes = (0..n)
        .map(|j| ModeMoments { a: vals[3 * j], a2: vals[3 * j + 1], n: C64::new(vals[3 * j + 2].re, 0.0) })
        .collect();
    let mut pairs = Vec::new();
    let mut idx = 3 * n;
    for j in 0..n {
        for k in j + 1..n {
            pairs.push(PairMoments { j, k, ab: vals[idx], adag_b: vals[idx + 1] });
            idx += 2;
        }
    }
    Ok(MomentRecord { modes, pairs })
}

/// Mean and covariance (`ħ = 2`) of the Gaussian state with the given moments.
pub fn covariance_from_moments(m: &MomentRecord) -> Result<GaussianState> {
    let n = m.n_modes();
    if n == 0 {
        return Err(invalid_arg!("moment record has no modes"));
    }
    let mut mean = DVector::zeros(2 * n);
    let mut cov = DMatrix::zeros(2 * n, 2 * n);
    for (j, mm) in m.modes.iter().enumerate() {
        if mm.n.re < -1e-9 {
            return Err(invalid_arg!("negative photon number {} in mode {j}", mm.n.re));
        }
        let (q, p) = (2.0 * mm.a.re, 2.0 * mm.a.im);
        mean[2 * j] = q;
        mean[2 * j + 1] = p;
        cov[(2 * j, 2 * j)] = 1.0 + 2.0 * mm.n.re + 2.0 * mm.a2.re - q * q;
        cov[(2 * j + 1, 2 * j + 1)] = 1.0 + 2.0 * mm.n.re - 2.0 * mm.a2.re - p * p;
        let qp = 2.0 * mm.a2.im - q * p;
        cov[(2 * j, 2 * j + 1)] = qp;
        cov[(2 * j + 1, 2 * j)] = qp;
    }
    for j in 0..n {
        for k in j + 1..n {
            let pm = m.pair(j, k).ok_or_else(|| invalid_arg!("missing cross moments for modes ({j}, {k})"))?;
            let (ab, ad) = (pm.ab, pm.adag_b);
            let (qj, pj, qk, pk) = (mean[2 * j], mean[2 * j + 1], mean[2 * k], mean[2 * k + 1]);
            let qq = 2.0 * ab.re + 2.0 * ad.re - qj * qk;
            let pp = -2.0 * ab.re + 2.0 * ad.re - pj * pk;
            let qp = 2.0 * ab.im + 2.0 * ad.im - qj * pk;
            let pq = 2.0 * ab.im - 2.0 * ad.im - pj * qk;
            for (r, c, v) in [(2 * j, 2 * k, qq), (2 * j + 1, 2 * k + 1, pp), (2 * j, 2 * k + 1, qp), (2 * j + 1, 2 * k, pq)] {
                cov[(r, c)] = v;
                cov[(c, r)] = v;
            }
        }
    }
    GaussianState::new(mean, cov)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{build_state, FockConfig, StateKind};
    #[allow(unused_imports)]
    use num_traits::Float;

    #[test]
    fn coherent_moments_and_covariance() {
        let a = C64::new(1.0, 0.0);
        let c = build_state(StateKind::Coherent(a), 30, &FockConfig::default()).unwrap();
        let m = moments(&c).unwrap();
        assert!((m.modes[0].a - a).norm() < 1e-8);
        assert!((m.modes[0].a2 - a * a).norm() < 1e-8);
        assert!((m.modes[0].n.re - 1.0).abs() < 1e-8);
        let g = covariance_from_moments(&m).unwrap();
        assert!((g.mean()[0] - 2.0).abs() < 1e-8);
        assert!((g.cov() - DMatrix::identity(2, 2)).norm() < 1e-7);
    }

    #[test]
    fn single_photon_is_thermal_like() {
        let f = build_state(StateKind::Fock(1), 5, &FockConfig::default()).unwrap();
        let g = covariance_from_moments(&moments(&f).unwrap()).unwrap();
        assert!((g.cov() - DMatrix::identity(2, 2) * 3.0).norm() < 1e-12);
    }

    #[test]
    fn tmsv_moments_give_phase_sensitive_correlations() {
        let t = build_state(StateKind::Tmsv(1.0), 40, &FockConfig::default()).unwrap();
        let m = moments(&t).unwrap();
        assert!((m.pairs[0].ab.re - 2f64.sqrt()).abs() < 1e-6);
        let g = covariance_from_moments(&m).unwrap();
        let exact = GaussianState::tmsv(1.0).unwrap();
        assert!(g.max_abs_diff(&exact) < 1e-6);
    }

    #[test]
    fn missing_pair_is_rejected() {
        let t = build_state(StateKind::Tmsv(0.2), 20, &FockConfig::default()).unwrap();
        let mut m = moments(&t).unwrap();
        m.pairs.clear();
        assert!(matches!(covariance_from_moments(&m), Err(Error::InvalidArgument(_))));
    }
}
