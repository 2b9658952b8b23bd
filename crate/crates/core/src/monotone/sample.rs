//! Seeded samplers for property checks.

use alloc::vec::Vec;
use core::f64::consts::PI;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::family::InputParams;
use crate::gaussian::{gaussian_unitary, GaussianState, GaussianUnitary, SymplecticOp};
use crate::{Result, C64};

/// Deterministic generator for a given seed.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform draw from `[lo, hi)`.
pub fn uniform(rng: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.random::<f64>()
}

/// Ranges for [`random_params`]; `alpha_max` bounds `|α|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamBox {
    pub alpha_max: f64,
    pub r_max: f64,
    pub n_s_max: f64,
    pub complex_alpha: bool,
}

impl Default for ParamBox {
    fn default() -> Self {
        Self { alpha_max: 1.5, r_max: 0.8, n_s_max: 2.0, complex_alpha: true }
    }
}

/// Input-family parameters drawn uniformly from `b` (angles over `[0, 2π)`).
pub fn random_params(rng: &mut impl Rng, b: &ParamBox) -> InputParams {
    let mag = uniform(rng, 0.0, b.alpha_max);
    let phase = if b.complex_alpha { uniform(rng, 0.0, 2.0 * PI) } else { 0.0 };
    InputParams {
        alpha: C64::from_polar(mag, phase),
        theta: uniform(rng, 0.0, 2.0 * PI),
        r: uniform(rng, 0.0, b.r_max),
        n_s: uniform(rng, 0.0, b.n_s_max),
    }
}

/// Random Gaussian unitary on `n` modes: layers of single-mode squeezers,
/// rotations and displacements interleaved with beamsplitters.
pub fn random_symplectic(rng: &mut impl Rng, n: usize, strength: f64) -> Result<SymplecticOp> {
    let mut op = SymplecticOp::identity(n);
    for _layer in 0..2 {
        for m in 0..n {
            let kinds = [
                GaussianUnitary::Rotation(uniform(rng, 0.0, 2.0 * PI)),
                GaussianUnitary::Squeeze(uniform(rng, -strength, strength)),
                GaussianUnitary::Displacement(C64::new(uniform(rng, -strength, strength), uniform(rng, -strength, strength))),
            ];
            for k in kinds {
                op = op.then(&gaussian_unitary(k, n, &[m])?)?;
            }
        }
        for m in 0..n.saturating_sub(1) {
            op = op.then(&gaussian_unitary(GaussianUnitary::BeamSplitter(uniform(rng, 0.0, 1.0)), n, &[m, m + 1])?)?;
        }
    }
    Ok(op)
}

/// Random `n`-mode Gaussian state: thermal modes with up to `n_max` photons
/// under a random Gaussian unitary.
pub fn random_gaussian_state(rng: &mut impl Rng, n: usize, n_max: f64, strength: f64) -> Result<GaussianState> {
    let mut s = GaussianState::thermal(uniform(rng, 0.0, n_max))?;
    for _ in 1..n {
        s = s.tensor(&GaussianState::thermal(uniform(rng, 0.0, n_max))?);
    }
    s.apply(&random_symplectic(rng, n, strength)?)
}

/// `count` draws from [`random_params`].
pub fn random_params_list(seed: u64, count: usize, b: &ParamBox) -> Vec<InputParams> {
    let mut r = rng(seed);
    (0..count).map(|_| random_params(&mut r, b)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_draws_are_reproducible() {
        let b = ParamBox::default();
        assert_eq!(random_params_list(7, 5, &b), random_params_list(7, 5, &b));
        assert_ne!(random_params_list(7, 5, &b), random_params_list(8, 5, &b));
        for p in random_params_list(1, 50, &b) {
            assert!(p.alpha.norm() <= 1.5 && p.r >= 0.0 && p.r <= 0.8 && p.n_s <= 2.0);
        }
    }

    #[test]
    fn random_operations_are_symplectic() {
        let mut r = rng(3);
        for n in 1..4 {
            let op = random_symplectic(&mut r, n, 0.5).unwrap();
            assert!(op.symplectic_defect() < 1e-10);
            random_gaussian_state(&mut r, n, 1.0, 0.5).unwrap();
        }
    }
}
