use alloc::vec::Vec;
use nalgebra::DMatrix;
#[allow(unused_imports)]
use num_traits::Float;

use super::{omega, GaussianState};
use crate::error::{invalid_arg, invalid_state};
use crate::{linalg, Error, Result, C64};

/// Symplectic eigenvalues below one by at most this much are clamped to one.
pub const MU_CLAMP: f64 = 1e-9;

/// Williamson (symplectic) spectrum `μ_k ≥ 1`, sorted descending.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct WilliamsonSpectrum {
    pub mu: Vec<f64>,
}

/// Full Williamson form `Λ = S (⊕ μ_k I) Sᵀ`.
#[derive(Debug, Clone)]
pub struct Williamson {
    pub mu: Vec<f64>,
    pub s: DMatrix<f64>,
}

/// Symplectic eigenvalues from the spectrum of `iΩΛ`.
///
/// The eigenvalues come in `±μ_k` pairs; the imaginary residue of every
/// eigenvalue must stay below `1e-8` relative to the largest one.
pub fn symplectic_eigenvalues(state: &GaussianState) -> Result<WilliamsonSpectrum> {
    let n = state.n_modes();
    let om = omega(n);
    let m = (&om * state.cov()).map(|x| C64::new(0.0, x));
    let schur = nalgebra::linalg::Schur::try_new(m, 1e-15, 10_000)
        .ok_or_else(|| Error::Numerical("eigenvalues of iΩΛ did not converge".into()))?;
    let eig = schur
        .eigenvalues()
        .ok_or_else(|| Error::Numerical("Schur form of iΩΛ is not triangular".into()))?;
    let scale = eig.iter().map(|z| z.norm()).fold(1.0, f64::max);
    if let Some(z) = eig.iter().find(|z| z.im.abs() > 1e-8 * scale) {
        return Err(invalid_state!("iΩΛ has a non-real eigenvalue {z}"));
    }
    let mut abs: Vec<f64> = eig.iter().map(|z| z.re.abs()).collect();
    abs.sort_by(|a, b| b.total_cmp(a));
    let mu = abs.chunks(2).map(|p| 0.5 * (p[0] + p[1])).collect();
    Ok(WilliamsonSpectrum { mu })
}

/// Entropy (bits) of a thermal state with mean photon number `n`:
/// `g(N) = (N+1) log₂(N+1) − N log₂ N`, with `g(0) = 0`.
pub fn thermal_entropy(n: f64) -> Result<f64> {
    if !(n >= 0.0) || !n.is_finite() {
        return Err(invalid_arg!("thermal entropy needs a finite N >= 0, got {n}"));
    }
    Ok(g(n))
}

pub(crate) fn g(n: f64) -> f64 {
    if n <= 0.0 {
        0.0
    } else {
        (n + 1.0) * (n + 1.0).log2() - n * n.log2()
    }
}

/// Von Neumann entropy (bits) of a Gaussian state: `Σ_k g((μ_k − 1)/2)`.
pub fn gaussian_entropy(state: &GaussianState) -> Result<f64> {
    let spec = symplectic_eigenvalues(state)?;
    let mut s = 0.0;
    for &mu in &spec.mu {
        if mu < 1.0 - MU_CLAMP {
            return Err(invalid_state!("symplectic eigenvalue {mu} below 1"));
        }
        s += g((mu.max(1.0) - 1.0) / 2.0);
    }
    Ok(s)
}

/// Williamson decomposition with an explicit symplectic `S`.
///
/// With `A = Λ^{-1/2} Ω Λ^{-1/2}`, the Hermitian matrix `iA` has eigenpairs
/// `±1/μ_k`; for the positive one, `v = x + iy` gives `A x = y/μ`, `A y = −x/μ`
/// and the orthogonal `O` with columns `(√2 y, √2 x)` brings `A` to
/// `⊕ (1/μ_k) J`. Then `S = Λ^{1/2} O diag(μ)^{-1/2}`.
pub fn williamson(state: &GaussianState) -> Result<Williamson> {
    let n = state.n_modes();
    let cov = state.cov();
    let sqrt = linalg::sym_sqrt(cov)?;
    let inv_sqrt = linalg::sym_apply(cov, |x| 1.0 / x.sqrt());
    let a = &inv_sqrt * omega(n) * &inv_sqrt;
    let h = a.map(|x| C64::new(0.0, x));
    let (vals, vecs) = linalg::hermitian_eigen(&h);
    let mut order: Vec<usize> = (0..2 * n).filter(|&i| vals[i] > 0.0).collect();
    if order.len() != n {
        return Err(Error::Numerical("Williamson eigenvalues did not pair up".into()));
    }
    // descending μ == ascending 1/μ
    order.sort_by(|&i, &j| vals[i].total_cmp(&vals[j]));
    let mut o = DMatrix::zeros(2 * n, 2 * n);
    let mut mu = Vec::with_capacity(n);
    let r2 = 2f64.sqrt();
    for (k, &i) in order.iter().enumerate() {
        let v = vecs.column(i);
        for row in 0..2 * n {
            o[(row, 2 * k)] = r2 * v[row].im;
            o[(row, 2 * k + 1)] = r2 * v[row].re;
        }
        mu.push(1.0 / vals[i]);
    }
    let d = DMatrix::from_fn(2 * n, 2 * n, |i, j| if i == j { 1.0 / mu[i / 2].sqrt() } else { 0.0 });
    let s = sqrt * o * d;
    Ok(Williamson { mu, s })
}

/// Phase-space Schmidt coefficients `λ_k` of a pure state across `part_a | rest`.
///
/// The smaller side's reduced state has symplectic eigenvalues `μ_k`, giving
/// `N_k = (μ_k − 1)/2` and `λ_k = √(N_k/(N_k+1))`; the list is zero-padded to
/// the larger side's mode count.
pub fn schmidt_decompose(state: &GaussianState, part_a: &[usize]) -> Result<Vec<f64>> {
    let n = state.n_modes();
    let spec = symplectic_eigenvalues(state)?;
    if spec.mu.iter().any(|&m| (m - 1.0).abs() > 1e-6) {
        return Err(invalid_state!("Schmidt decomposition needs a pure state"));
    }
    let part_b: Vec<usize> = (0..n).filter(|k| !part_a.contains(k)).collect();
    if part_a.is_empty() || part_b.is_empty() {
        return Err(invalid_arg!("bipartition must leave modes on both sides"));
    }
    let (small, large) = if part_a.len() <= part_b.len() {
        (part_a, part_b.len())
    } else {
        (&part_b[..], part_a.len())
    };
    let red = state.partial_trace(small)?;
    let mut lambdas: Vec<f64> = symplectic_eigenvalues(&red)?
        .mu
        .iter()
        .map(|&mu| {
            let nk = ((mu - 1.0) / 2.0).max(0.0);
            (nk / (nk + 1.0)).sqrt()
        })
        .collect();
    lambdas.resize(large, 0.0);
    Ok(lambdas)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::{gaussian_unitary, GaussianUnitary};

    #[test]
    fn spectra_of_reference_states() {
        let vac = symplectic_eigenvalues(&GaussianState::vacuum(1).unwrap()).unwrap().mu;
        assert!(vac.len() == 1 && (vac[0] - 1.0).abs() < 1e-14);
        let th = symplectic_eigenvalues(&GaussianState::thermal(1.0).unwrap()).unwrap();
        assert!((th.mu[0] - 3.0).abs() < 1e-12);
        for ns in [1.0, 2.0] {
            let t = symplectic_eigenvalues(&GaussianState::tmsv(ns).unwrap()).unwrap();
            assert!(t.mu.iter().all(|m| (m - 1.0).abs() < 1e-9), "{:?}", t.mu);
        }
    }

    #[test]
    fn thermal_entropy_values() {
        assert_eq!(thermal_entropy(0.0).unwrap(), 0.0);
        assert!((thermal_entropy(1.0).unwrap() - 2.0).abs() < 1e-15);
        let expected = 1.5 * 1.5f64.log2() - 0.5 * 0.5f64.log2();
        assert!((thermal_entropy(0.5).unwrap() - expected).abs() < 1e-15);
        assert!((thermal_entropy(0.5).unwrap() - 1.37744).abs() < 1e-5);
        assert!(thermal_entropy(-0.1).is_err());
    }

    #[test]
    fn entropies() {
        assert_eq!(gaussian_entropy(&GaussianState::vacuum(2).unwrap()).unwrap(), 0.0);
        assert!((gaussian_entropy(&GaussianState::thermal(1.0).unwrap()).unwrap() - 2.0).abs() < 1e-12);
        assert!(gaussian_entropy(&GaussianState::tmsv(3.0).unwrap()).unwrap() < 1e-8);
    }

    #[test]
    fn williamson_reconstructs_covariance() {
        let s = GaussianState::thermal(0.7)
            .unwrap()
            .tensor(&GaussianState::thermal(2.0).unwrap())
            .apply(
                &gaussian_unitary(GaussianUnitary::BeamSplitter(0.3), 2, &[0, 1])
                    .unwrap()
                    .then(&gaussian_unitary(GaussianUnitary::Squeeze(0.4), 2, &[1]).unwrap())
                    .unwrap(),
            )
            .unwrap();
        let w = williamson(&s).unwrap();
        assert!((w.mu[0] - 5.0).abs() < 1e-9 && (w.mu[1] - 2.4).abs() < 1e-9, "{:?}", w.mu);
        let d = DMatrix::from_fn(4, 4, |i, j| if i == j { w.mu[i / 2] } else { 0.0 });
        assert!((&w.s * d * w.s.transpose() - s.cov()).amax() < 1e-9);
        let om = omega(2);
        assert!((&w.s * &om * w.s.transpose() - om).amax() < 1e-9);
    }

    #[test]
    fn williamson_of_degenerate_spectrum() {
        let s = GaussianState::thermal(1.0).unwrap().tensor(&GaussianState::thermal(1.0).unwrap());
        let w = williamson(&s).unwrap();
        let om = omega(2);
        assert!((&w.s * &om * w.s.transpose() - om).amax() < 1e-9);
    }

    #[test]
    fn schmidt_coefficients() {
        let l = schmidt_decompose(&GaussianState::tmsv(1.0).unwrap(), &[0]).unwrap();
        assert!((l[0] - 0.5f64.sqrt()).abs() < 1e-9);
        assert!(schmidt_decompose(&GaussianState::vacuum(2).unwrap(), &[0]).unwrap()[0].abs() < 1e-9);
        let three = GaussianState::tmsv(1.0).unwrap().tensor(&GaussianState::vacuum(1).unwrap());
        let l = schmidt_decompose(&three, &[0]).unwrap();
        assert_eq!(l.len(), 2);
        assert!((l[0] - 0.5f64.sqrt()).abs() < 1e-9 && l[1] == 0.0);
        assert!(schmidt_decompose(&GaussianState::thermal(1.0).unwrap().tensor(&GaussianState::vacuum(1).unwrap()), &[0]).is_err());
    }
}
