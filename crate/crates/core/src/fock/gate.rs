//! Unitary gates in the truncated Fock basis.

use alloc::vec;
use alloc::vec::Vec;
use nalgebra::DMatrix;
#[allow(unused_imports)]
use num_traits::Float;

use super::basis::{apply_local, norm_sqr, resize, total_dim, Ladder};
use super::sparse::{dense_unitary, quadratic_generator, Generator, Sparse};
use crate::error::invalid_arg;
use crate::gaussian::{gaussian_unitary, GaussianUnitary, SymplecticOp};
use crate::{Result, C64};

/// Working dimension used to evaluate generators before cropping to `d`.
pub fn padded(d: usize) -> usize {
    d + (d / 2).max(10)
}

/// A unitary acting on selected modes of a Fock-basis state.
#[derive(Debug, Clone, PartialEq)]
pub enum Gate {
    Gaussian { kind: GaussianUnitary, targets: Vec<usize> },
    /// `exp(−iγ (a†a)²)`.
    Kerr { gamma: f64, mode: usize },
    /// Gaussian unitary given by its affine phase-space action on `modes`.
    Symplectic { op: SymplecticOp, modes: Vec<usize> },
}

impl Gate {
    pub fn gaussian(kind: GaussianUnitary, targets: &[usize]) -> Self {
        Gate::Gaussian { kind, targets: targets.to_vec() }
    }

    pub fn modes(&self) -> Vec<usize> {
        match self {
            Gate::Gaussian { targets, .. } => targets.clone(),
            Gate::Kerr { mode, .. } => vec![*mode],
            Gate::Symplectic { modes, .. } => modes.clone(),
        }
    }

    /// Same gate with every mode index shifted by `offset`.
    pub fn shifted(&self, offset: usize) -> Self {
        let mut g = self.clone();
        match &mut g {
            Gate::Gaussian { targets, .. } => targets.iter_mut().for_each(|t| *t += offset),
            Gate::Kerr { mode, .. } => *mode += offset,
            Gate::Symplectic { modes, .. } => modes.iter_mut().for_each(|t| *t += offset),
        }
        g
    }

    /// Whether the gate is Gaussian.
    pub fn is_gaussian(&self) -> bool {
        !matches!(self, Gate::Kerr { .. })
    }

    /// Phase-space action on an `n_modes` system; `None` for non-Gaussian gates.
    pub fn to_symplectic(&self, n_modes: usize) -> Result<Option<SymplecticOp>> {
        self.validate(n_modes)?;
        match self {
            Gate::Gaussian { kind, targets } => Ok(Some(gaussian_unitary(*kind, n_modes, targets)?)),
            Gate::Symplectic { op, modes } => Ok(Some(op.embed(n_modes, modes)?)),
            Gate::Kerr { .. } => Ok(None),
        }
    }

    fn validate(&self, n_modes: usize) -> Result<()> {
        let modes = self.modes();
        if modes.iter().any(|&m| m >= n_modes) {
            return Err(invalid_arg!("gate mode out of range for {n_modes}-mode state"));
        }
        for (i, a) in modes.iter().enumerate() {
            if modes[i + 1..].contains(a) {
                return Err(invalid_arg!("gate modes must be distinct"));
            }
        }
        match self {
            Gate::Gaussian { kind, targets } if kind.arity() != targets.len() => {
                Err(invalid_arg!("{kind:?} needs {} target modes", kind.arity()))
            }
            Gate::Symplectic { op, modes } if op.n_modes() != modes.len() => {
                Err(invalid_arg!("symplectic gate acts on {} modes, got {}", op.n_modes(), modes.len()))
            }
            Gate::Kerr { gamma, .. } if !gamma.is_finite() => Err(invalid_arg!("non-finite Kerr strength")),
            _ => Ok(()),
        }
    }

    /// Prepares the gate for repeated application to kets with per-mode `dims`.
    pub fn prepare(&self, dims: &[usize]) -> Result<PreparedGate> {
        self.validate(dims.len())?;
        let mut steps = Vec::new();
        match self {
            Gate::Gaussian { kind, targets } => match *kind {
                GaussianUnitary::Rotation(theta) => steps.push(diagonal(targets[0], dims, |n| -theta * n)),
                GaussianUnitary::Displacement(alpha) => {
                    let m = targets[0];
                    steps.push(local_step(&displacement_generator(alpha, 0), &displacement_generator(alpha, m), m, dims));
                }
                GaussianUnitary::Squeeze(r) => {
                    let m = targets[0];
                    steps.push(local_step(&squeeze_generator(r, 0), &squeeze_generator(r, m), m, dims));
                }
                GaussianUnitary::TwoModeSqueeze(r) => {
                    let mut g = Generator::new();
                    let (a, b) = (targets[0], targets[1]);
                    g.push(C64::new(-r, 0.0), vec![Ladder::a(a), Ladder::a(b)]);
                    g.push(C64::new(r, 0.0), vec![Ladder::adag(a), Ladder::adag(b)]);
                    steps.push(sparse_step(&g, targets, dims));
                }
                GaussianUnitary::BeamSplitter(tau) => {
                    let theta = tau.sqrt().acos();
                    let mut g = Generator::new();
                    let (a, b) = (targets[0], targets[1]);
                    g.push(C64::new(theta, 0.0), vec![Ladder::adag(a), Ladder::a(b)]);
                    g.push(C64::new(-theta, 0.0), vec![Ladder::a(a), Ladder::adag(b)]);
                    steps.push(sparse_step(&g, targets, dims));
                }
            },
            Gate::Kerr { gamma, mode } => steps.push(diagonal(*mode, dims, |n| -gamma * n * n)),
            Gate::Symplectic { op, modes } => {
                let [h_p, h_o] = op.quadratic_hamiltonians()?;
                for h in [h_o, h_p] {
                    if h.iter().any(|x| x.abs() > 1e-14) {
                        let g = quadratic_generator(&h, modes);
                        if modes.len() == 1 {
                            steps.push(local_step(&quadratic_generator(&h, &[0]), &g, modes[0], dims));
                        } else {
                            steps.push(sparse_step(&g, modes, dims));
                        }
                    }
                }
                let delta = op.displacement();
                for (k, &m) in modes.iter().enumerate() {
                    let alpha = C64::new(delta[2 * k], delta[2 * k + 1]) * 0.5;
                    if alpha.norm() > 0.0 {
                        steps.push(local_step(&displacement_generator(alpha, 0), &displacement_generator(alpha, m), m, dims));
                    }
                }
            }
        }
        Ok(PreparedGate { dims: dims.to_vec(), steps })
    }
}

fn displacement_generator(alpha: C64, m: usize) -> Generator {
    let mut g = Generator::new();
    g.push(alpha, vec![Ladder::adag(m)]);
    g.push(-alpha.conj(), vec![Ladder::a(m)]);
    g
}

fn squeeze_generator(r: f64, m: usize) -> Generator {
    let mut g = Generator::new();
    g.push(C64::new(0.5 * r, 0.0), vec![Ladder::a(m), Ladder::a(m)]);
    g.push(C64::new(-0.5 * r, 0.0), vec![Ladder::adag(m), Ladder::adag(m)]);
    g
}

fn diagonal(mode: usize, dims: &[usize], phase: impl Fn(f64) -> f64) -> Step {
    let d = dims[mode];
    let mut m = DMatrix::zeros(d, d);
    for n in 0..d {
        let (s, c) = phase(n as f64).sin_cos();
        m[(n, n)] = C64::new(c, s);
    }
    Step::Local(mode, m)
}

/// Single-mode exponential: a dense matrix, or the Taylor action on the full
/// ket when the other modes make the dense exponential the larger cost.
fn local_step(g0: &Generator, g: &Generator, m: usize, dims: &[usize]) -> Step {
    let dw = padded(dims[m]);
    let rest = (total_dim(dims) / dims[m]) as f64;
    let norm = g0.compile(&[dw]).norm1();
    // Taylor action: ~60 flops per nonzero and unit of norm; dense: ~25 d³
    if rest * norm * 2.4 < (dw * dw) as f64 {
        sparse_step(g, &[m], dims)
    } else {
        Step::Local(m, dense_unitary(g0, dims[m], dw))
    }
}

fn sparse_step(g: &Generator, targets: &[usize], dims: &[usize]) -> Step {
    let mut work = dims.to_vec();
    for &t in targets {
        work[t] = padded(dims[t]);
    }
    let sparse = g.compile(&work);
    Step::Sparse { work, sparse }
}

#[derive(Debug, Clone)]
enum Step {
    Local(usize, DMatrix<C64>),
    Sparse { work: Vec<usize>, sparse: Sparse },
}

/// A gate compiled for a fixed set of per-mode dimensions.
#[derive(Debug, Clone)]
pub struct PreparedGate {
    dims: Vec<usize>,
    steps: Vec<Step>,
}

impl PreparedGate {
    /// Applies the gate; returns the new ket and the weight lost to truncation.
    pub fn apply(&self, ket: &[C64]) -> (Vec<C64>, f64) {
        let before = norm_sqr(ket);
        let mut v = ket.to_vec();
        for step in &self.steps {
            v = match step {
                Step::Local(m, u) => apply_local(&v, &self.dims, *m, u),
                Step::Sparse { work, sparse } => {
                    let (big, _) = resize(&v, &self.dims, work);
                    let out = sparse.expm_action(&big);
                    resize(&out, work, &self.dims).0
                }
            };
        }
        let lost = (before - norm_sqr(&v)).max(0.0);
        (v, lost)
    }
}

/// Dense matrix of an elementary unitary on `arity` modes of dimension `d` each.
///
/// Rotation and Kerr are exact; the others are exponentials of the truncated
/// generator evaluated in a padded space and cropped, so unitarity holds on
/// the low-energy subspace.
pub fn build_unitary(gate: &Gate, d: usize) -> Result<DMatrix<C64>> {
    if d < 2 {
        return Err(invalid_arg!("cutoff must be at least 2, got {d}"));
    }
    let modes = gate.modes();
    let n = modes.iter().copied().max().unwrap_or(0) + 1;
    let dims = vec![d; n];
    let prepared = gate.prepare(&dims)?;
    let dim = d.pow(n as u32);
    let mut u = DMatrix::zeros(dim, dim);
    let mut e = vec![C64::new(0.0, 0.0); dim];
    for i in 0..dim {
        e[i] = C64::new(1.0, 0.0);
        let (col, _) = prepared.apply(&e);
        u.set_column(i, &nalgebra::DVector::from_vec(col));
        e[i] = C64::new(0.0, 0.0);
    }
    Ok(u)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coherent_amps(alpha: C64, d: usize) -> Vec<C64> {
        let mut v = vec![C64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0)];
        for n in 1..d {
            let prev = v[n - 1];
            v.push(prev * alpha / (n as f64).sqrt());
        }
        v
    }

    #[test]
    fn displacement_of_vacuum_is_coherent() {
        let alpha = C64::new(1.3, -0.9);
        let u = build_unitary(&Gate::gaussian(GaussianUnitary::Displacement(alpha), &[0]), 40).unwrap();
        let exact = coherent_amps(alpha, 40);
        for n in 0..40 {
            assert!((u[(n, 0)] - exact[n]).norm() < 1e-8);
        }
    }

    #[test]
    fn kerr_and_rotation_are_diagonal() {
        let u = build_unitary(&Gate::Kerr { gamma: 0.3, mode: 0 }, 6).unwrap();
        for n in 0..6 {
            let ph = -0.3 * (n * n) as f64;
            assert!((u[(n, n)] - C64::new(ph.cos(), ph.sin())).norm() < 1e-15);
        }
        let r = build_unitary(&Gate::gaussian(GaussianUnitary::Rotation(0.4), &[0]), 6).unwrap();
        assert!((r[(3, 3)] - C64::new((-1.2f64).cos(), (-1.2f64).sin())).norm() < 1e-15);
        assert_eq!(r[(3, 2)], C64::new(0.0, 0.0));
    }

    #[test]
    fn symplectic_gate_matches_elementary_gates() {
        let dims = [14, 14];
        let mut ket = vec![C64::new(0.0, 0.0); 196];
        ket[0] = C64::new(0.6, 0.0);
        ket[14 + 1] = C64::new(0.0, 0.8);
        for kind in [
            GaussianUnitary::TwoModeSqueeze(0.3),
            GaussianUnitary::BeamSplitter(0.3),
        ] {
            let direct = Gate::gaussian(kind, &[0, 1]).prepare(&dims).unwrap().apply(&ket).0;
            let op = gaussian_unitary(kind, 2, &[0, 1]).unwrap();
            let via = Gate::Symplectic { op, modes: vec![0, 1] }.prepare(&dims).unwrap().apply(&ket).0;
            let overlap: C64 = direct.iter().zip(&via).map(|(a, b)| a.conj() * b).sum();
            assert!((overlap.norm() - 1.0).abs() < 1e-8, "{kind:?}: {overlap}");
        }
    }
}
