//! Product Fock basis indexing and ladder-operator words.

use alloc::vec;
use alloc::vec::Vec;
use nalgebra::DMatrix;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::invalid_arg;
use crate::{Result, C64};

/// A single annihilation (`dag == false`) or creation operator on `mode`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ladder {
    pub mode: usize,
    pub dag: bool,
}

impl Ladder {
    pub const fn a(mode: usize) -> Self {
        Self { mode, dag: false }
    }

    pub const fn adag(mode: usize) -> Self {
        Self { mode, dag: true }
    }
}

/// An operator product written left to right; it acts on kets right to left.
pub type Word = Vec<Ladder>;

/// Row-major strides for a product basis (mode 0 most significant).
pub fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

pub fn total_dim(dims: &[usize]) -> usize {
    dims.iter().product()
}

/// Occupation number of `mode` in basis state `index`.
#[inline]
pub fn occupation(index: usize, strides: &[usize], dims: &[usize], mode: usize) -> usize {
    (index / strides[mode]) % dims[mode]
}

/// Applies `word` to basis state `index`; `None` when the result leaves the
/// truncated space or vanishes.
#[inline]
pub fn apply_word(index: usize, word: &[Ladder], strides: &[usize], dims: &[usize]) -> Option<(usize, f64)> {
    let mut idx = index;
    let mut amp = 1.0;
    for op in word.iter().rev() {
        let n = occupation(idx, strides, dims, op.mode);
        if op.dag {
            if n + 1 >= dims[op.mode] {
                return None;
            }
            amp *= ((n + 1) as f64).sqrt();
            idx += strides[op.mode];
        } else {
            if n == 0 {
                return None;
            }
            amp *= (n as f64).sqrt();
            idx -= strides[op.mode];
        }
    }
    Some((idx, amp))
}

/// Truncated annihilation operator: `a|n⟩ = √n |n−1⟩` on `0..d`.
pub fn ladder(d: usize) -> Result<DMatrix<C64>> {
    if d < 2 {
        return Err(invalid_arg!("ladder operator needs dimension >= 2, got {d}"));
    }
    let mut m = DMatrix::zeros(d, d);
    for n in 1..d {
        m[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
    }
    Ok(m)
}

/// Creation operator as a `(d+1) × d` matrix, exact on the truncated input.
pub fn creation_exact(d: usize) -> DMatrix<C64> {
    let mut m = DMatrix::zeros(d + 1, d);
    for n in 0..d {
        m[(n + 1, n)] = C64::new(((n + 1) as f64).sqrt(), 0.0);
    }
    m
}

/// `⟨ψ|w|ψ⟩` for a ket in the product basis.
pub fn ket_expectation(ket: &[C64], dims: &[usize], word: &[Ladder]) -> C64 {
    let st = strides(dims);
    let mut acc = C64::new(0.0, 0.0);
    for (i, &psi) in ket.iter().enumerate() {
        if psi == C64::new(0.0, 0.0) {
            continue;
        }
        if let Some((j, c)) = apply_word(i, word, &st, dims) {
            acc += ket[j].conj() * psi * c;
        }
    }
    acc
}

/// `Tr(ρ w)` for a density matrix in the product basis.
pub fn density_expectation(rho: &DMatrix<C64>, dims: &[usize], word: &[Ladder]) -> C64 {
    let st = strides(dims);
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..rho.nrows() {
        if let Some((j, c)) = apply_word(i, word, &st, dims) {
            acc += rho[(i, j)] * c;
        }
    }
    acc
}

/// Applies a `d_out × d_in` matrix to one mode of a ket; returns the new ket.
pub fn apply_local(ket: &[C64], dims: &[usize], mode: usize, m: &DMatrix<C64>) -> Vec<C64> {
    let d_in = dims[mode];
    debug_assert_eq!(m.ncols(), d_in);
    let d_out = m.nrows();
    let outer: usize = dims[..mode].iter().product();
    let inner: usize = dims[mode + 1..].iter().product();
    let mut out = vec![C64::new(0.0, 0.0); outer * d_out * inner];
    for o in 0..outer {
        let src = &ket[o * d_in * inner..(o + 1) * d_in * inner];
        let dst = &mut out[o * d_out * inner..(o + 1) * d_out * inner];
        for n in 0..d_in {
            let row = &src[n * inner..(n + 1) * inner];
            if row.iter().all(|z| z.re == 0.0 && z.im == 0.0) {
                continue;
            }
            for j in 0..d_out {
                let c = m[(j, n)];
                if c.re == 0.0 && c.im == 0.0 {
                    continue;
                }
                let d = &mut dst[j * inner..(j + 1) * inner];
                for (x, &y) in d.iter_mut().zip(row) {
                    *x += c * y;
                }
            }
        }
    }
    out
}

/// Re-embeds a ket into larger (or smaller) per-mode dimensions, dropping
/// amplitudes outside the target space. Returns the ket and the dropped weight.
pub fn resize(ket: &[C64], dims: &[usize], new_dims: &[usize]) -> (Vec<C64>, f64) {
    let st = strides(dims);
    let nst = strides(new_dims);
    let mut out = vec![C64::new(0.0, 0.0); total_dim(new_dims)];
    let mut lost = 0.0;
    for (i, &z) in ket.iter().enumerate() {
        let mut j = 0;
        let mut inside = true;
        for m in 0..dims.len() {
            let n = occupation(i, &st, dims, m);
            if n >= new_dims[m] {
                inside = false;
                break;
            }
            j += n * nst[m];
        }
        if inside {
            out[j] = z;
        } else {
            lost += z.norm_sqr();
        }
    }
    (out, lost)
}

pub fn norm_sqr(ket: &[C64]) -> f64 {
    ket.iter().map(|z| z.norm_sqr()).sum()
}

pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ladder_two_levels() {
        let a = ladder(2).unwrap();
        assert_eq!(a[(0, 1)], C64::new(1.0, 0.0));
        assert_eq!(a[(0, 0)] + a[(1, 0)] + a[(1, 1)], C64::new(0.0, 0.0));
        assert!(ladder(1).is_err());
    }

    #[test]
    fn number_operator_and_commutator() {
        let d = 6;
        let a = ladder(d).unwrap();
        let n = a.adjoint() * &a;
        for k in 0..d {
            assert!((n[(k, k)].re - k as f64).abs() < 1e-14);
        }
        let comm = &a * a.adjoint() - a.adjoint() * &a;
        for k in 0..d - 1 {
            assert!((comm[(k, k)].re - 1.0).abs() < 1e-14);
        }
        assert!((comm[(d - 1, d - 1)].re + (d as f64 - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn word_application_matches_matrices() {
        let dims = [3, 4];
        let st = strides(&dims);
        // a_0† a_1 on |0, 2⟩ = √2 |1, 1⟩
        let i = 2;
        let (j, c) = apply_word(i, &[Ladder::adag(0), Ladder::a(1)], &st, &dims).unwrap();
        assert_eq!(j, 4 + 1);
        assert!((c - 2f64.sqrt()).abs() < 1e-15);
        assert!(apply_word(0, &[Ladder::a(0)], &st, &dims).is_none());
        assert!(apply_word(3, &[Ladder::adag(1)], &st, &dims).is_none());
    }

    #[test]
    fn local_application_on_second_mode() {
        let dims = [2, 3];
        let mut ket = vec![C64::new(0.0, 0.0); 6];
        ket[1] = C64::new(1.0, 0.0); // |0,1⟩
        let a = ladder(3).unwrap();
        let out = apply_local(&ket, &dims, 1, &a);
        assert_eq!(out[0], C64::new(1.0, 0.0));
        let grown = apply_local(&ket, &dims, 1, &creation_exact(3));
        assert_eq!(grown.len(), 8);
        assert!((grown[2].re - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn resize_drops_outside_weight() {
        let dims = [3];
        let ket = vec![C64::new(0.6, 0.0), C64::new(0.0, 0.0), C64::new(0.8, 0.0)];
        let (small, lost) = resize(&ket, &dims, &[2]);
        assert_eq!(small.len(), 2);
        assert!((lost - 0.64).abs() < 1e-15);
        let (big, lost) = resize(&ket, &dims, &[5]);
        assert_eq!(lost, 0.0);
        assert_eq!(big[2], C64::new(0.8, 0.0));
    }
}
