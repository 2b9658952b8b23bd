//! Phase-space invariants and the convention lock against the Fock backend.

mod common;

use common::{cfg, pinned, random_state};
use nalgebra::DMatrix;
use nongauss_core::fock::{apply_map, gaussify, ConditionalMap, FockArray, Gate};
use nongauss_core::gaussian::{gaussian_entropy, gaussian_unitary, symplectic_form, GaussianState, GaussianUnitary};
use nongauss_core::linalg::hermitian_eigenvalues;
use nongauss_core::monotone::sample::{random_gaussian_state, random_symplectic, rng, uniform};
use nongauss_core::C64;
use proptest::prelude::*;

/// Smallest eigenvalue of `Λ + iΩ`.
fn uncertainty_margin(s: &GaussianState) -> f64 {
    let n = s.n_modes();
    let om = symplectic_form(n).unwrap();
    let m = DMatrix::from_fn(2 * n, 2 * n, |i, j| C64::new(s.cov()[(i, j)], om[(i, j)]));
    hermitian_eigenvalues(&m)[0]
}

proptest! {
    #![proptest_config(pinned(100))]

    #[test]
    fn produced_ops_are_symplectic(seed in any::<u64>(), n in 1usize..4) {
        let mut r = rng(seed);
        let op = random_symplectic(&mut r, n, 0.8).unwrap();
        let om = symplectic_form(n).unwrap();
        let s = op.matrix();
        prop_assert!((s * &om * s.transpose() - om).amax() < 1e-10);
    }

    #[test]
    fn entropy_invariant_under_symplectic(seed in any::<u64>(), n in 1usize..4) {
        let mut r = rng(seed);
        let st = random_gaussian_state(&mut r, n, 2.0, 0.6).unwrap();
        let op = random_symplectic(&mut r, n, 0.6).unwrap();
        let before = gaussian_entropy(&st).unwrap();
        let after = gaussian_entropy(&st.apply(&op).unwrap()).unwrap();
        prop_assert!((before - after).abs() < 1e-9, "{before} vs {after}");
    }

    #[test]
    fn physicality_preserved(seed in any::<u64>(), n in 2usize..4) {
        let mut r = rng(seed);
        let st = random_gaussian_state(&mut r, n, 1.5, 0.6).unwrap();
        let out = st.apply(&random_symplectic(&mut r, n, 0.6).unwrap()).unwrap();
        prop_assert!(uncertainty_margin(&out) > -1e-9);
        let keep: Vec<usize> = (0..n).filter(|k| k % 2 == 0).collect();
        prop_assert!(uncertainty_margin(&out.partial_trace(&keep).unwrap()) > -1e-9);
    }

    #[test]
    fn purify_then_trace_round_trip(seed in any::<u64>(), n in 1usize..4) {
        let mut r = rng(seed);
        let st = random_gaussian_state(&mut r, n, 2.0, 0.5).unwrap();
        let pure = st.purify().unwrap();
        prop_assert!(pure.is_pure(1e-8).unwrap());
        let keep: Vec<usize> = (0..n).collect();
        prop_assert!(pure.partial_trace(&keep).unwrap().max_abs_diff(&st) <= 1e-9);
    }
}

fn random_kind(r: &mut impl rand::Rng, which: usize) -> GaussianUnitary {
    match which {
        0 => GaussianUnitary::Displacement(C64::new(uniform(r, -0.6, 0.6), uniform(r, -0.6, 0.6))),
        1 => GaussianUnitary::Rotation(uniform(r, -3.0, 3.0)),
        2 => GaussianUnitary::Squeeze(uniform(r, -0.4, 0.4)),
        3 => GaussianUnitary::TwoModeSqueeze(uniform(r, -0.3, 0.3)),
        _ => GaussianUnitary::BeamSplitter(uniform(r, 0.0, 1.0)),
    }
}

/// Fock gates and phase-space maps agree on the first two moments of
/// arbitrary (here non-Gaussian) low-energy inputs.
#[test]
fn convention_lock_on_moments() {
    let d = 40;
    let mut r = rng(2024);
    for which in 0..5 {
        for _ in 0..10 {
            let kind = random_kind(&mut r, which);
            let n = kind.arity();
            let dims = vec![d; n];
            let rho: FockArray = random_state(&mut r, &dims, 3, false);
            let targets: Vec<usize> = (0..n).collect();
            let out = apply_map(&rho, &ConditionalMap::unitary(n, Gate::gaussian(kind, &targets)), &cfg()).unwrap().state;
            let fock_side = gaussify(&out).unwrap();
            let phase_side = gaussify(&rho).unwrap().apply(&gaussian_unitary(kind, n, &targets).unwrap()).unwrap();
            let dev = fock_side.max_abs_diff(&phase_side);
            assert!(dev < 1e-6, "{kind:?}: moment deviation {dev:e}");
        }
    }
}
