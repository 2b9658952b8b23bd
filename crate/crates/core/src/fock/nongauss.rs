//! The Gaussification map and the relative-entropy non-Gaussianity.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use super::array::{relative_entropy, von_neumann_entropy, FockArray, FockConfig, FockData};
use super::basis::{strides, total_dim};
use super::gate::Gate;
use super::moments::{covariance_from_moments, moments};
use crate::error::invalid_arg;
use crate::gaussian::{gaussian_entropy, williamson, GaussianState, SymplecticOp};
use crate::{Error, Result, C64};

/// Gaussian state with the same mean and covariance as `rho`.
pub fn gaussify(rho: &FockArray) -> Result<GaussianState> {
    covariance_from_moments(&moments(rho)?)
}

/// `S(gaussify(ρ)) − S(ρ)` in bits.
///
/// Values in `[−1e-6, 0)` are clamped to zero; anything more negative signals
/// a truncation problem and is reported as a numerical error.
pub fn delta_g(rho: &FockArray, cfg: &FockConfig) -> Result<f64> {
    let sg = gaussian_entropy(&gaussify(rho)?)?;
    let s = von_neumann_entropy(rho, cfg)?;
    let d = sg - s;
    if d < -1e-6 {
        return Err(Error::Numerical(alloc::format!(
            "negative non-Gaussianity {d:.3e}; the cutoff is too small for this state"
        )));
    }
    Ok(d.max(0.0))
}

/// `S(ρ ‖ gaussify(ρ))` with the Gaussian reference rebuilt in the Fock basis
/// of `rho`; agrees with [`delta_g`] up to truncation.
pub fn delta_g_relative(rho: &FockArray, cfg: &FockConfig) -> Result<f64> {
    // every thermal member is kept: a rank-truncated σ would put ρ off its support
    let sigma = gaussian_fock_image(&gaussify(rho)?, rho.dims(), cfg, 0.0)?;
    relative_entropy(rho, &sigma, cfg)
}

/// Fock representation of a Gaussian state with cutoff `d` on every mode.
pub fn gaussian_to_fock(state: &GaussianState, d: usize, cfg: &FockConfig) -> Result<FockArray> {
    gaussian_to_fock_dims(state, &vec![d; state.n_modes()], cfg)
}

/// Fock representation of a Gaussian state with per-mode dimensions `dims`.
///
/// Uses `Λ = S (⊕ μ_k I) Sᵀ`: a product of thermal states with `(μ_k − 1)/2`
/// photons, the Gaussian unitary of `S`, then the displacement by the mean.
pub fn gaussian_to_fock_dims(state: &GaussianState, dims: &[usize], cfg: &FockConfig) -> Result<FockArray> {
    // members are dropped once the remaining thermal weight is far below op_tol
    gaussian_fock_image(state, dims, cfg, 1e-2 * cfg.op_tol)
}

fn gaussian_fock_image(state: &GaussianState, dims: &[usize], cfg: &FockConfig, budget: f64) -> Result<FockArray> {
    let n = state.n_modes();
    if dims.len() != n || dims.iter().any(|&d| d < 2) {
        return Err(invalid_arg!("need one cutoff >= 2 per mode"));
    }
    let w = williamson(state)?;
    let op = SymplecticOp::new(w.s.clone(), state.mean().clone())?;
    let gate = Gate::Symplectic { op, modes: (0..n).collect() };
    let prepared = gate.prepare(dims)?;

    // per-mode thermal populations, truncated where negligible
    let mut pops: Vec<Vec<f64>> = Vec::with_capacity(n);
    for (k, &mu) in w.mu.iter().enumerate() {
        let nbar = ((mu - 1.0) / 2.0).max(0.0);
        let x = nbar / (nbar + 1.0);
        let mut p = Vec::new();
        let mut v = 1.0 / (nbar + 1.0);
        for _ in 0..dims[k] {
            if v < 1e-17 {
                break;
            }
            p.push(v);
            v *= x;
        }
        pops.push(p);
    }
    // product populations, heaviest first
    let mut terms: Vec<(f64, Vec<usize>)> = Vec::new();
    let mut idx = vec![0usize; n];
    'odometer: loop {
        let weight: f64 = (0..n).map(|k| pops[k][idx[k]]).product();
        if weight > 1e-16 {
            terms.push((weight, idx.clone()));
        }
        let mut k = n;
        loop {
            if k == 0 {
                break 'odometer;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < pops[k].len() {
                break;
            }
            idx[k] = 0;
        }
    }
    terms.sort_by(|a, b| b.0.total_cmp(&a.0));

    let st = strides(dims);
    let dim = total_dim(dims);
    let mut kets = Vec::new();
    let mut kept = 0.0;
    let mut lost = 0.0;
    for (weight, idx) in &terms {
        if 1.0 - kept <= budget {
            break;
        }
        let mut e = vec![C64::new(0.0, 0.0); dim];
        let at: usize = (0..n).map(|k| idx[k] * st[k]).sum();
        e[at] = C64::new(weight.sqrt(), 0.0);
        let (ket, l) = prepared.apply(&e);
        kets.push(ket);
        kept += weight;
        lost += l;
    }
    let deficit = (1.0 - kept).max(0.0) + lost;
    if deficit > cfg.op_tol {
        let d = dims.iter().copied().max().unwrap_or(2);
        return Err(Error::Truncation { deficit, bound: cfg.op_tol, suggested_cutoff: d + d / 2 });
    }
    let data = if kets.len() == 1 {
        FockData::Ket(kets.pop().unwrap_or_default())
    } else {
        FockData::Mixture(kets)
    };
    Ok(FockArray::with_deficit(dims.to_vec(), data, deficit))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{build_state, StateKind};
    use crate::gaussian::{gaussian_unitary, GaussianUnitary};
    use nalgebra::DMatrix;

    fn cfg() -> FockConfig {
        FockConfig::default()
    }

    #[test]
    fn single_photon_has_two_bits() {
        let one = build_state(StateKind::Fock(1), 30, &cfg()).unwrap();
        assert!((delta_g(&one, &cfg()).unwrap() - 2.0).abs() < 1e-3);
        let g = gaussify(&one).unwrap();
        assert!((g.cov() - DMatrix::identity(2, 2) * 3.0).norm() < 1e-12);
    }

    #[test]
    fn coherent_state_is_gaussian() {
        let c = build_state(StateKind::Coherent(C64::new(1.0, -0.5)), 40, &cfg()).unwrap();
        assert!(delta_g(&c, &cfg()).unwrap() < 1e-6);
    }

    #[test]
    fn thermal_round_trip() {
        let th = GaussianState::thermal(1.0).unwrap();
        let f = gaussian_to_fock(&th, 60, &cfg()).unwrap();
        let rho = f.to_density();
        for n in 0..10 {
            assert!((rho[(n, n)].re - 0.5f64.powi(n as i32 + 1)).abs() < 1e-9);
        }
    }

    #[test]
    fn tmsv_routes_agree() {
        let g = GaussianState::tmsv(1.0).unwrap();
        let a = gaussian_to_fock(&g, 40, &cfg()).unwrap();
        let b = build_state(StateKind::Tmsv(1.0), 40, &cfg()).unwrap();
        let (FockData::Ket(x), FockData::Ket(y)) = (a.data(), b.data()) else { panic!("{:?}", a.kind()) };
        let ov: C64 = x.iter().zip(y).map(|(p, q)| p.conj() * q).sum();
        assert!((ov.norm() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn squeezed_thermal_moments_round_trip() {
        let op = gaussian_unitary(GaussianUnitary::Squeeze(0.3), 1, &[0])
            .unwrap()
            .then(&gaussian_unitary(GaussianUnitary::Displacement(C64::new(0.4, 0.2)), 1, &[0]).unwrap())
            .unwrap();
        let g = GaussianState::thermal(0.4).unwrap().apply(&op).unwrap();
        let f = gaussian_to_fock(&g, 50, &cfg()).unwrap();
        let back = gaussify(&f).unwrap();
        assert!(back.max_abs_diff(&g) < 1e-5);
        assert!(delta_g(&f, &cfg()).unwrap() < 1e-4);
        assert!(delta_g_relative(&f, &cfg()).unwrap() < 1e-4);
    }

    #[test]
    fn relative_route_matches_for_single_photon() {
        let one = build_state(StateKind::Fock(1), 40, &cfg()).unwrap();
        let r = delta_g_relative(&one, &cfg()).unwrap();
        assert!((r - 2.0).abs() < 2e-3, "{r}");
    }
}
