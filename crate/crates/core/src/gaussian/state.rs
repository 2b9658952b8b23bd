use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector};
#[allow(unused_imports)]
use num_traits::Float;

use super::symplectic::SymplecticOp;
use super::williamson::williamson;
use super::omega;
use crate::error::{invalid_arg, invalid_state};
use crate::{linalg, Result, C64};

/// Absolute symmetry tolerance for covariance matrices.
pub const TRACE_TOL_SYMMETRY: f64 = 1e-10;

/// A Gaussian state: mean vector and covariance matrix over `n_modes` modes.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    mean: DVector<f64>,
    cov: DMatrix<f64>,
}

impl GaussianState {
    /// Builds a state after checking symmetry and the uncertainty principle `Λ + iΩ ⪰ 0`.
    pub fn new(mean: DVector<f64>, cov: DMatrix<f64>) -> Result<Self> {
        let state = Self::new_unchecked(mean, cov)?;
        state.validate()?;
        Ok(state)
    }

    /// Builds a state checking only shapes and finiteness.
    pub(crate) fn new_unchecked(mean: DVector<f64>, cov: DMatrix<f64>) -> Result<Self> {
        let dim = mean.len();
        if dim == 0 || dim % 2 != 0 {
            return Err(invalid_arg!("mean vector length {dim} is not 2n with n >= 1"));
        }
        if cov.nrows() != dim || cov.ncols() != dim {
            return Err(invalid_arg!(
                "covariance is {}x{}, expected {dim}x{dim}",
                cov.nrows(),
                cov.ncols()
            ));
        }
        if mean.iter().chain(cov.iter()).any(|x| !x.is_finite()) {
            return Err(invalid_arg!("non-finite entries in mean or covariance"));
        }
        Ok(Self { mean, cov })
    }

    fn validate(&self) -> Result<()> {
        let scale = self.cov.amax().max(1.0);
        let asym = (&self.cov - self.cov.transpose()).amax();
        if asym > TRACE_TOL_SYMMETRY * scale {
            return Err(invalid_state!("covariance not symmetric (defect {asym:.3e})"));
        }
        let n = self.n_modes();
        let om = omega(n);
        let m = DMatrix::from_fn(2 * n, 2 * n, |i, j| C64::new(self.cov[(i, j)], om[(i, j)]));
        let min = linalg::hermitian_eigenvalues(&m)[0];
        if min < -1e-9 * scale {
            return Err(invalid_state!("covariance violates the uncertainty principle (min eigenvalue {min:.3e})"));
        }
        Ok(())
    }

    pub fn n_modes(&self) -> usize {
        self.mean.len() / 2
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }

    /// Multi-mode vacuum.
    pub fn vacuum(n_modes: usize) -> Result<Self> {
        if n_modes == 0 {
            return Err(invalid_arg!("vacuum needs at least one mode"));
        }
        Ok(Self {
            mean: DVector::zeros(2 * n_modes),
            cov: DMatrix::identity(2 * n_modes, 2 * n_modes),
        })
    }

    /// Single-mode thermal state with mean photon number `n_mean`: `Λ = (2N+1) I`.
    pub fn thermal(n_mean: f64) -> Result<Self> {
        if !(n_mean >= 0.0) || !n_mean.is_finite() {
            return Err(invalid_arg!("thermal photon number must be finite and >= 0, got {n_mean}"));
        }
        Ok(Self {
            mean: DVector::zeros(2),
            cov: DMatrix::identity(2, 2) * (2.0 * n_mean + 1.0),
        })
    }

    /// Single-mode coherent state `|α⟩`: mean `(2 Re α, 2 Im α)`, identity covariance.
    pub fn coherent(alpha: C64) -> Result<Self> {
        if !alpha.re.is_finite() || !alpha.im.is_finite() {
            return Err(invalid_arg!("coherent amplitude must be finite"));
        }
        Ok(Self {
            mean: DVector::from_vec(alloc::vec![2.0 * alpha.re, 2.0 * alpha.im]),
            cov: DMatrix::identity(2, 2),
        })
    }

    /// Two-mode squeezed vacuum with `N_S` mean photons per mode.
    ///
    /// `Λ = [[(2N_S+1) I, 2C_p Z], [2C_p Z, (2N_S+1) I]]` with `C_p = √(N_S(N_S+1))`.
    pub fn tmsv(n_s: f64) -> Result<Self> {
        if !(n_s >= 0.0) || !n_s.is_finite() {
            return Err(invalid_arg!("TMSV photon number must be finite and >= 0, got {n_s}"));
        }
        let d = 2.0 * n_s + 1.0;
        let c = 2.0 * (n_s * (n_s + 1.0)).sqrt();
        #[rustfmt::skip]
        let cov = DMatrix::from_row_slice(4, 4, &[
            d, 0.0, c, 0.0,
            0.0, d, 0.0, -c,
            c, 0.0, d, 0.0,
            0.0, -c, 0.0, d,
        ]);
        Ok(Self { mean: DVector::zeros(4), cov })
    }

    /// Tensor product `self ⊗ other` (modes of `self` first).
    pub fn tensor(&self, other: &Self) -> Self {
        let (a, b) = (self.mean.len(), other.mean.len());
        let mut mean = DVector::zeros(a + b);
        mean.rows_mut(0, a).copy_from(&self.mean);
        mean.rows_mut(a, b).copy_from(&other.mean);
        let mut cov = DMatrix::zeros(a + b, a + b);
        cov.view_mut((0, 0), (a, a)).copy_from(&self.cov);
        cov.view_mut((a, a), (b, b)).copy_from(&other.cov);
        Self { mean, cov }
    }

    /// Affine action of a Gaussian unitary: `x̄ → S x̄ + Δx`, `Λ → S Λ Sᵀ`.
    pub fn apply(&self, op: &SymplecticOp) -> Result<Self> {
        if op.n_modes() != self.n_modes() {
            return Err(invalid_arg!(
                "operation acts on {} modes, state has {}",
                op.n_modes(),
                self.n_modes()
            ));
        }
        let s = op.matrix();
        let mean = s * &self.mean + op.displacement();
        let mut cov = s * &self.cov * s.transpose();
        symmetrize(&mut cov);
        Ok(Self { mean, cov })
    }

    /// Keeps the listed modes (in the given order) and traces out the rest.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        if keep.is_empty() {
            return Err(invalid_arg!("partial trace must keep at least one mode"));
        }
        let n = self.n_modes();
        for (i, &k) in keep.iter().enumerate() {
            if k >= n {
                return Err(invalid_arg!("mode {k} out of range for {n}-mode state"));
            }
            if keep[..i].contains(&k) {
                return Err(invalid_arg!("mode {k} listed twice"));
            }
        }
        let idx: Vec<usize> = keep.iter().flat_map(|&k| [2 * k, 2 * k + 1]).collect();
        let mean = DVector::from_iterator(idx.len(), idx.iter().map(|&i| self.mean[i]));
        let cov = DMatrix::from_fn(idx.len(), idx.len(), |i, j| self.cov[(idx[i], idx[j])]);
        Ok(Self { mean, cov })
    }

    /// Mean photon number of mode `k`: `(Λ_qq + Λ_pp + q̄² + p̄² − 2) / 4`.
    pub fn mean_photons(&self, k: usize) -> f64 {
        let (q, p) = (2 * k, 2 * k + 1);
        (self.cov[(q, q)] + self.cov[(p, p)] + self.mean[q].powi(2) + self.mean[p].powi(2) - 2.0) / 4.0
    }

    /// Total mean photon number.
    pub fn total_photons(&self) -> f64 {
        (0..self.n_modes()).map(|k| self.mean_photons(k)).sum()
    }

    /// `true` when every symplectic eigenvalue equals one within `tol`.
    pub fn is_pure(&self, tol: f64) -> Result<bool> {
        let spec = super::symplectic_eigenvalues(self)?;
        Ok(spec.mu.iter().all(|&m| (m - 1.0).abs() <= tol))
    }

    /// Gaussian purification on `2n` modes: system modes `0..n`, ancillas `n..2n`.
    ///
    /// Each symplectic eigenvalue `μ_k` becomes a TMSV with `(μ_k − 1)/2` photons
    /// between system mode `k` and ancilla `n + k`; the Williamson symplectic then
    /// acts on the system half.
    pub fn purify(&self) -> Result<Self> {
        let n = self.n_modes();
        let w = williamson(self)?;
        let mut cov = DMatrix::zeros(4 * n, 4 * n);
        for (k, &mu) in w.mu.iter().enumerate() {
            let mu = mu.max(1.0);
            let c = (mu * mu - 1.0).sqrt();
            let (sq, sp, aq, ap) = (2 * k, 2 * k + 1, 2 * (n + k), 2 * (n + k) + 1);
            cov[(sq, sq)] = mu;
            cov[(sp, sp)] = mu;
            cov[(aq, aq)] = mu;
            cov[(ap, ap)] = mu;
            cov[(sq, aq)] = c;
            cov[(aq, sq)] = c;
            cov[(sp, ap)] = -c;
            cov[(ap, sp)] = -c;
        }
        let mut big = DMatrix::identity(4 * n, 4 * n);
        big.view_mut((0, 0), (2 * n, 2 * n)).copy_from(&w.s);
        let mut cov = &big * cov * big.transpose();
        symmetrize(&mut cov);
        let mut mean = DVector::zeros(4 * n);
        mean.rows_mut(0, 2 * n).copy_from(&self.mean);
        Ok(Self { mean, cov })
    }

    /// `Tr(ρ σ)` for two Gaussian states:
    /// `2ⁿ / √det(Λ₁ + Λ₂) · exp(−½ δᵀ (Λ₁ + Λ₂)⁻¹ δ)` with `δ = x̄₁ − x̄₂`.
    pub fn overlap(&self, other: &Self) -> Result<f64> {
        if self.n_modes() != other.n_modes() {
            return Err(invalid_arg!("overlap of states with different mode counts"));
        }
        let sum = &self.cov + &other.cov;
        let delta = &self.mean - &other.mean;
        let chol = sum
            .clone()
            .cholesky()
            .ok_or_else(|| invalid_state!("Λ₁ + Λ₂ is not positive definite"))?;
        let det: f64 = chol.l().diagonal().iter().map(|x| x * x).product();
        let quad = delta.dot(&chol.solve(&delta));
        Ok(2f64.powi(self.n_modes() as i32) / det.sqrt() * (-0.5 * quad).exp())
    }

    /// Largest absolute entry difference in mean and covariance.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.mean.len() != other.mean.len() {
            return f64::INFINITY;
        }
        (&self.mean - &other.mean).amax().max((&self.cov - &other.cov).amax())
    }
}

pub(crate) fn symmetrize(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::{gaussian_entropy, symplectic_eigenvalues};

    #[test]
    fn tmsv_covariance_entries() {
        let s = GaussianState::tmsv(1.0).unwrap();
        let c = 2.0 * 2f64.sqrt();
        assert_eq!(s.cov()[(0, 0)], 3.0);
        assert!((s.cov()[(0, 2)] - c).abs() < 1e-15);
        assert!((s.cov()[(1, 3)] + c).abs() < 1e-15);
        assert_eq!(GaussianState::tmsv(0.0).unwrap(), GaussianState::vacuum(2).unwrap());
    }

    #[test]
    fn tmsv_negative_photons_rejected() {
        assert!(GaussianState::tmsv(-0.1).is_err());
        assert!(GaussianState::thermal(-1.0).is_err());
    }

    #[test]
    fn unphysical_covariance_rejected() {
        let cov = DMatrix::identity(2, 2) * 0.5;
        assert!(matches!(
            GaussianState::new(DVector::zeros(2), cov),
            Err(crate::Error::InvalidState(_))
        ));
        let asym = DMatrix::from_row_slice(2, 2, &[2.0, 0.1, 0.0, 2.0]);
        assert!(GaussianState::new(DVector::zeros(2), asym).is_err());
    }

    #[test]
    fn partial_trace_of_product_and_tmsv() {
        let prod = GaussianState::vacuum(1).unwrap().tensor(&GaussianState::thermal(2.0).unwrap());
        assert_eq!(prod.partial_trace(&[1]).unwrap(), GaussianState::thermal(2.0).unwrap());
        let red = GaussianState::tmsv(1.5).unwrap().partial_trace(&[0]).unwrap();
        assert!(red.max_abs_diff(&GaussianState::thermal(1.5).unwrap()) < 1e-14);
        assert!(prod.partial_trace(&[]).is_err());
        assert!(prod.partial_trace(&[2]).is_err());
    }

    #[test]
    fn reduced_tmsv_entropy_is_thermal() {
        let red = GaussianState::tmsv(1.0).unwrap().partial_trace(&[1]).unwrap();
        assert!((gaussian_entropy(&red).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn purify_pure_state_adds_vacuum() {
        let s = GaussianState::coherent(C64::new(0.3, -0.2)).unwrap();
        let p = s.purify().unwrap();
        assert!(p.partial_trace(&[1]).unwrap().max_abs_diff(&GaussianState::vacuum(1).unwrap()) < 1e-12);
        assert!(p.partial_trace(&[0]).unwrap().max_abs_diff(&s) < 1e-12);
    }

    #[test]
    fn purify_thermal_is_pure_tmsv_like() {
        let p = GaussianState::thermal(1.0).unwrap().purify().unwrap();
        let mu = symplectic_eigenvalues(&p).unwrap().mu;
        assert!(mu.iter().all(|m| (m - 1.0).abs() < 1e-9));
        let back = p.partial_trace(&[0]).unwrap();
        assert!(back.max_abs_diff(&GaussianState::thermal(1.0).unwrap()) < 1e-9);
    }

    #[test]
    fn overlap_of_coherent_and_thermal() {
        let a = C64::new(0.7, 0.4);
        let vac = GaussianState::vacuum(1).unwrap();
        let coh = GaussianState::coherent(a).unwrap();
        assert!((vac.overlap(&coh).unwrap() - (-a.norm_sqr()).exp()).abs() < 1e-14);
        let th = GaussianState::thermal(2.0).unwrap();
        assert!((vac.overlap(&th).unwrap() - 1.0 / 3.0).abs() < 1e-14);
        assert!((coh.overlap(&coh).unwrap() - 1.0).abs() < 1e-14);
    }
}
