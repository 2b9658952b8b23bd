use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector};
#[allow(unused_imports)]
use num_traits::Float;

use super::omega;
use crate::error::invalid_arg;
use crate::{linalg, Error, Result, C64};

/// Tolerance on `S Ω Sᵀ = Ω`, relative to the largest entry of `S`.
const SYMPLECTIC_TOL: f64 = 1e-10;

/// Affine phase-space action `x → S x + Δx` of a Gaussian unitary.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticOp {
    s: DMatrix<f64>,
    delta: DVector<f64>,
}

/// Elementary Gaussian unitaries.
///
/// The matrix conventions follow the Heisenberg action of the generators
/// `D_α = exp(α a† − α* a)`, `R_θ = exp(−iθ a†a)`, `S_r = exp(r(a² − a†²)/2)`,
/// `S₂,ᵣ = exp(−r(ab − a†b†))` and the beamsplitter `exp(θ(a†b − ab†))` with
/// `cos²θ = τ`; they are cross-checked against the Fock backend.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum GaussianUnitary {
    Displacement(C64),
    Rotation(f64),
    Squeeze(f64),
    TwoModeSqueeze(f64),
    /// Beamsplitter with the given transmissivity `τ ∈ [0, 1]`.
    BeamSplitter(f64),
}

impl GaussianUnitary {
    /// Number of modes the unitary acts on.
    pub fn arity(&self) -> usize {
        match self {
            Self::TwoModeSqueeze(_) | Self::BeamSplitter(_) => 2,
            _ => 1,
        }
    }

    fn check(&self) -> Result<()> {
        let finite = match *self {
            Self::Displacement(a) => a.re.is_finite() && a.im.is_finite(),
            Self::Rotation(x) | Self::Squeeze(x) | Self::TwoModeSqueeze(x) => x.is_finite(),
            Self::BeamSplitter(t) => {
                if !(0.0..=1.0).contains(&t) {
                    return Err(invalid_arg!("beamsplitter transmissivity {t} outside [0, 1]"));
                }
                true
            }
        };
        if finite {
            Ok(())
        } else {
            Err(invalid_arg!("non-finite Gaussian unitary parameter"))
        }
    }

    /// Local `2k × 2k` symplectic block and displacement.
    fn local(&self) -> (DMatrix<f64>, DVector<f64>) {
        match *self {
            Self::Displacement(a) => (
                DMatrix::identity(2, 2),
                DVector::from_vec(alloc::vec![2.0 * a.re, 2.0 * a.im]),
            ),
            Self::Rotation(t) => {
                let (s, c) = t.sin_cos();
                (DMatrix::from_row_slice(2, 2, &[c, s, -s, c]), DVector::zeros(2))
            }
            Self::Squeeze(r) => (
                DMatrix::from_row_slice(2, 2, &[(-r).exp(), 0.0, 0.0, r.exp()]),
                DVector::zeros(2),
            ),
            Self::TwoModeSqueeze(r) => {
                let (c, s) = (r.cosh(), r.sinh());
                #[rustfmt::skip]
                let m = DMatrix::from_row_slice(4, 4, &[
                    c, 0.0, s, 0.0,
                    0.0, c, 0.0, -s,
                    s, 0.0, c, 0.0,
                    0.0, -s, 0.0, c,
                ]);
                (m, DVector::zeros(4))
            }
            Self::BeamSplitter(tau) => {
                let (c, s) = (tau.sqrt(), (1.0 - tau).sqrt());
                #[rustfmt::skip]
                let m = DMatrix::from_row_slice(4, 4, &[
                    c, 0.0, s, 0.0,
                    0.0, c, 0.0, s,
                    -s, 0.0, c, 0.0,
                    0.0, -s, 0.0, c,
                ]);
                (m, DVector::zeros(4))
            }
        }
    }
}

/// Embeds an elementary Gaussian unitary at `targets` of an `n_modes` system.
pub fn gaussian_unitary(kind: GaussianUnitary, n_modes: usize, targets: &[usize]) -> Result<SymplecticOp> {
    kind.check()?;
    if targets.len() != kind.arity() {
        return Err(invalid_arg!(
            "{:?} acts on {} modes, got {} targets",
            kind,
            kind.arity(),
            targets.len()
        ));
    }
    if targets.iter().any(|&t| t >= n_modes) {
        return Err(invalid_arg!("target mode out of range for {n_modes}-mode system"));
    }
    if targets.len() == 2 && targets[0] == targets[1] {
        return Err(invalid_arg!("two-mode unitary needs distinct targets"));
    }
    let (local, d) = kind.local();
    let idx: Vec<usize> = targets.iter().flat_map(|&t| [2 * t, 2 * t + 1]).collect();
    let mut s = DMatrix::identity(2 * n_modes, 2 * n_modes);
    let mut delta = DVector::zeros(2 * n_modes);
    for (a, &i) in idx.iter().enumerate() {
        delta[i] = d[a];
        for (b, &j) in idx.iter().enumerate() {
            s[(i, j)] = local[(a, b)];
        }
    }
    Ok(SymplecticOp { s, delta })
}

impl SymplecticOp {
    /// Builds an operation after checking `S Ω Sᵀ = Ω`.
    pub fn new(s: DMatrix<f64>, delta: DVector<f64>) -> Result<Self> {
        let dim = delta.len();
        if dim == 0 || dim % 2 != 0 || s.nrows() != dim || s.ncols() != dim {
            return Err(invalid_arg!("symplectic matrix and displacement have inconsistent sizes"));
        }
        let op = Self { s, delta };
        let defect = op.symplectic_defect();
        if defect > SYMPLECTIC_TOL * op.s.amax().max(1.0).powi(2) {
            return Err(invalid_arg!("matrix is not symplectic (defect {defect:.3e})"));
        }
        Ok(op)
    }

    pub fn identity(n_modes: usize) -> Self {
        Self {
            s: DMatrix::identity(2 * n_modes, 2 * n_modes),
            delta: DVector::zeros(2 * n_modes),
        }
    }

    pub fn n_modes(&self) -> usize {
        self.delta.len() / 2
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.s
    }

    pub fn displacement(&self) -> &DVector<f64> {
        &self.delta
    }

    /// Largest entry of `S Ω Sᵀ − Ω`.
    pub fn symplectic_defect(&self) -> f64 {
        let om = omega(self.n_modes());
        (&self.s * &om * self.s.transpose() - om).amax()
    }

    /// `other ∘ self`: apply `self` first.
    pub fn then(&self, other: &Self) -> Result<Self> {
        if self.n_modes() != other.n_modes() {
            return Err(invalid_arg!("cannot compose operations on different mode counts"));
        }
        Ok(Self {
            s: &other.s * &self.s,
            delta: &other.s * &self.delta + &other.delta,
        })
    }

    /// Embeds the action at `modes` of an `n_modes` system (identity elsewhere).
    pub fn embed(&self, n_modes: usize, modes: &[usize]) -> Result<Self> {
        if modes.len() != self.n_modes() || modes.iter().any(|&m| m >= n_modes) {
            return Err(invalid_arg!("cannot embed a {}-mode action at {modes:?} of {n_modes} modes", self.n_modes()));
        }
        for (i, a) in modes.iter().enumerate() {
            if modes[i + 1..].contains(a) {
                return Err(invalid_arg!("embedding modes must be distinct"));
            }
        }
        let idx: Vec<usize> = modes.iter().flat_map(|&t| [2 * t, 2 * t + 1]).collect();
        let mut s = DMatrix::identity(2 * n_modes, 2 * n_modes);
        let mut delta = DVector::zeros(2 * n_modes);
        for (a, &i) in idx.iter().enumerate() {
            delta[i] = self.delta[a];
            for (b, &j) in idx.iter().enumerate() {
                s[(i, j)] = self.s[(a, b)];
            }
        }
        Ok(Self { s, delta })
    }

    /// Inverse affine map `x → S⁻¹(x − Δx)`, with `S⁻¹ = −Ω Sᵀ Ω`.
    pub fn inverse(&self) -> Self {
        let om = omega(self.n_modes());
        let inv = -(&om * self.s.transpose() * &om);
        let delta = -(&inv * &self.delta);
        Self { s: inv, delta }
    }

    /// Quadratic Hamiltonians `H₁, H₂` (real symmetric) with `S = exp(2ΩH₁) exp(2ΩH₂)`.
    ///
    /// `S = P O` is the polar decomposition: `P = (S Sᵀ)^{1/2}` is positive
    /// symplectic with symmetric logarithm, `O` is orthogonal symplectic and
    /// equivalent to an `n × n` unitary whose logarithm gives the passive part.
    /// `Ĥ = ½ xᵀ H x` then generates `x → exp(2ΩH) x` under `exp(−iĤ)`.
    pub fn quadratic_hamiltonians(&self) -> Result<[DMatrix<f64>; 2]> {
        let n = self.n_modes();
        let om = omega(n);
        let sst = &self.s * self.s.transpose();
        let p = linalg::sym_sqrt(&sst)?;
        let log_p = linalg::sym_apply(&sst, |x| 0.5 * x.ln());
        let p_inv = p
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Numerical("singular polar factor".into()))?;
        let o = p_inv * &self.s;
        let u = DMatrix::from_fn(n, n, |j, k| C64::new(o[(2 * j, 2 * k)], o[(2 * j + 1, 2 * k)]));
        let l = linalg::unitary_log(&u)?;
        let mut log_o = DMatrix::zeros(2 * n, 2 * n);
        for j in 0..n {
            for k in 0..n {
                let z = l[(j, k)];
                log_o[(2 * j, 2 * k)] = z.re;
                log_o[(2 * j, 2 * k + 1)] = -z.im;
                log_o[(2 * j + 1, 2 * k)] = z.im;
                log_o[(2 * j + 1, 2 * k + 1)] = z.re;
            }
        }
        let to_h = |l: &DMatrix<f64>| {
            let mut h = -(&om * l) * 0.5;
            super::state::symmetrize(&mut h);
            h
        };
        Ok([to_h(&log_p), to_h(&log_o)])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::{gaussian_entropy, GaussianState};
    use core::f64::consts::PI;

    fn kinds() -> [GaussianUnitary; 5] {
        [
            GaussianUnitary::Displacement(C64::new(0.4, -1.1)),
            GaussianUnitary::Rotation(0.7),
            GaussianUnitary::Squeeze(0.35),
            GaussianUnitary::TwoModeSqueeze(0.6),
            GaussianUnitary::BeamSplitter(0.3),
        ]
    }

    #[test]
    fn every_kind_is_symplectic() {
        for k in kinds() {
            let targets: Vec<usize> = if k.arity() == 1 { alloc::vec![1] } else { alloc::vec![2, 0] };
            let op = gaussian_unitary(k, 3, &targets).unwrap();
            assert!(op.symplectic_defect() < 1e-12, "{k:?}");
        }
    }

    #[test]
    fn displacement_on_vacuum_gives_coherent() {
        let a = C64::new(0.5, -0.25);
        let op = gaussian_unitary(GaussianUnitary::Displacement(a), 1, &[0]).unwrap();
        let out = GaussianState::vacuum(1).unwrap().apply(&op).unwrap();
        assert_eq!(out, GaussianState::coherent(a).unwrap());
    }

    #[test]
    fn two_mode_squeeze_on_vacuum_gives_tmsv() {
        let lambda: f64 = 0.6;
        let op = gaussian_unitary(GaussianUnitary::TwoModeSqueeze(lambda.atanh()), 2, &[0, 1]).unwrap();
        let out = GaussianState::vacuum(2).unwrap().apply(&op).unwrap();
        let n_s = lambda * lambda / (1.0 - lambda * lambda);
        assert!(out.max_abs_diff(&GaussianState::tmsv(n_s).unwrap()) < 1e-12);
    }

    #[test]
    fn rotation_by_pi_negates_mean() {
        let op = gaussian_unitary(GaussianUnitary::Rotation(PI), 1, &[0]).unwrap();
        let s = GaussianState::coherent(C64::new(1.2, 0.3)).unwrap();
        let out = s.apply(&op).unwrap();
        assert!((out.mean() + s.mean()).amax() < 1e-14);
    }

    #[test]
    fn squeeze_on_vacuum_orientation() {
        let r = 0.4;
        let op = gaussian_unitary(GaussianUnitary::Squeeze(r), 1, &[0]).unwrap();
        let out = GaussianState::vacuum(1).unwrap().apply(&op).unwrap();
        assert!((out.cov()[(0, 0)] - (-2.0 * r).exp()).abs() < 1e-14);
        assert!((out.cov()[(1, 1)] - (2.0 * r).exp()).abs() < 1e-14);
    }

    #[test]
    fn identity_op_leaves_state() {
        let s = GaussianState::tmsv(0.7).unwrap();
        assert_eq!(s.apply(&SymplecticOp::identity(2)).unwrap(), s);
    }

    #[test]
    fn inverse_and_composition() {
        let a = gaussian_unitary(GaussianUnitary::TwoModeSqueeze(0.5), 2, &[0, 1]).unwrap();
        let b = gaussian_unitary(GaussianUnitary::Displacement(C64::new(1.0, 2.0)), 2, &[1]).unwrap();
        let ab = a.then(&b).unwrap();
        let back = ab.then(&ab.inverse()).unwrap();
        assert!((back.matrix() - DMatrix::<f64>::identity(4, 4)).amax() < 1e-12);
        assert!(back.displacement().amax() < 1e-12);
    }

    #[test]
    fn entropy_invariant_under_op() {
        let s = GaussianState::thermal(0.8).unwrap().tensor(&GaussianState::thermal(0.2).unwrap());
        let op = gaussian_unitary(GaussianUnitary::BeamSplitter(0.4), 2, &[0, 1])
            .unwrap()
            .then(&gaussian_unitary(GaussianUnitary::TwoModeSqueeze(0.3), 2, &[0, 1]).unwrap())
            .unwrap();
        let before = gaussian_entropy(&s).unwrap();
        let after = gaussian_entropy(&s.apply(&op).unwrap()).unwrap();
        assert!((before - after).abs() < 1e-9);
    }

    #[test]
    fn hamiltonians_reproduce_matrix() {
        let op = gaussian_unitary(GaussianUnitary::Squeeze(0.3), 2, &[0])
            .unwrap()
            .then(&gaussian_unitary(GaussianUnitary::BeamSplitter(0.6), 2, &[0, 1]).unwrap())
            .unwrap()
            .then(&gaussian_unitary(GaussianUnitary::Rotation(1.1), 2, &[1]).unwrap())
            .unwrap()
            .then(&gaussian_unitary(GaussianUnitary::TwoModeSqueeze(0.2), 2, &[0, 1]).unwrap())
            .unwrap();
        let [h1, h2] = op.quadratic_hamiltonians().unwrap();
        let om = omega(2);
        let to_c = |m: DMatrix<f64>| m.map(|x| C64::new(x, 0.0));
        let e1 = linalg::expm(&to_c(&om * &h1 * 2.0));
        let e2 = linalg::expm(&to_c(&om * &h2 * 2.0));
        let rebuilt = (e1 * e2).map(|z| z.re);
        assert!((rebuilt - op.matrix()).amax() < 1e-10);
        assert!((&h1 - h1.transpose()).amax() < 1e-12);
        assert!((&h2 - h2.transpose()).amax() < 1e-12);
    }

    #[test]
    fn bad_arguments() {
        assert!(gaussian_unitary(GaussianUnitary::BeamSplitter(1.5), 2, &[0, 1]).is_err());
        assert!(gaussian_unitary(GaussianUnitary::Squeeze(0.1), 1, &[1]).is_err());
        assert!(gaussian_unitary(GaussianUnitary::TwoModeSqueeze(0.1), 2, &[1, 1]).is_err());
        assert!(gaussian_unitary(GaussianUnitary::Rotation(f64::NAN), 1, &[0]).is_err());
        assert!(SymplecticOp::new(DMatrix::identity(2, 2) * 2.0, DVector::zeros(2)).is_err());
    }
}
