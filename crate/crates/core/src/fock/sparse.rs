//! Ladder-word generators and the action of their exponential on kets.

use alloc::vec;
use alloc::vec::Vec;
use nalgebra::DMatrix;
#[allow(unused_imports)]
use num_traits::Float;

use super::basis::{apply_word, strides, total_dim, Ladder, Word};
use crate::{linalg, C64};

/// Anti-Hermitian generator `G = Σ c_k w_k`; the unitary is `exp(G)`.
#[derive(Debug, Clone, Default)]
pub struct Generator {
    pub terms: Vec<(C64, Word)>,
}

impl Generator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, c: C64, word: Word) {
        if c.norm() == 0.0 {
            return;
        }
        if let Some(t) = self.terms.iter_mut().find(|t| t.1 == word) {
            t.0 += c;
        } else {
            self.terms.push((c, word));
        }
    }

    /// Compiles the generator on the product basis with per-mode `dims`.
    pub fn compile(&self, dims: &[usize]) -> Sparse {
        let st = strides(dims);
        let dim = total_dim(dims);
        let mut entries = Vec::new();
        for i in 0..dim {
            for (c, w) in &self.terms {
                if let Some((j, a)) = apply_word(i, w, &st, dims) {
                    entries.push((j as u32, i as u32, *c * a));
                }
            }
        }
        entries.sort_unstable_by_key(|e| (e.1, e.0));
        let mut col_sums = vec![0.0; dim];
        for e in &entries {
            col_sums[e.1 as usize] += e.2.norm();
        }
        let norm1 = col_sums.into_iter().fold(0.0, f64::max);
        Sparse { dim, entries, norm1 }
    }

    /// Dense matrix of the generator on one mode of dimension `d`.
    pub fn dense(&self, d: usize) -> DMatrix<C64> {
        let sp = self.compile(&[d]);
        let mut m = DMatrix::zeros(d, d);
        for &(j, i, c) in &sp.entries {
            m[(j as usize, i as usize)] += c;
        }
        m
    }
}

/// Coordinate-format sparse matrix.
#[derive(Debug, Clone)]
pub struct Sparse {
    dim: usize,
    entries: Vec<(u32, u32, C64)>,
    norm1: f64,
}

impl Sparse {
    /// Induced 1-norm of the generator.
    pub fn norm1(&self) -> f64 {
        self.norm1
    }

    fn matvec(&self, x: &[C64], y: &mut [C64], scale: f64) {
        y.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
        for &(j, i, c) in &self.entries {
            y[j as usize] += c * x[i as usize];
        }
        if scale != 1.0 {
            y.iter_mut().for_each(|z| *z *= scale);
        }
    }

    /// `exp(G) v` by Taylor series over adaptive substeps.
    ///
    /// `‖G‖₁` grows with the cutoff while low-energy vectors only feel the
    /// generator near their support, so each substep `h` is sized from
    /// `ρ = max(‖Gx‖, ‖G²x‖^½)/‖x‖` to keep `hρ ≤ 2`. A substep whose series
    /// has not converged after 80 terms is retried at half the length.
    pub fn expm_action(&self, v: &[C64]) -> Vec<C64> {
        debug_assert_eq!(v.len(), self.dim);
        const REACH: f64 = 2.0;
        let zero = C64::new(0.0, 0.0);
        let mut x = v.to_vec();
        let mut g1 = vec![zero; self.dim];
        let mut g2 = vec![zero; self.dim];
        let mut step = vec![zero; self.dim];
        let mut term = vec![zero; self.dim];
        let mut next = vec![zero; self.dim];
        // the worst case of the fixed-step scheme bounds the substep count
        let h_min = 1.0 / self.norm1.ceil().max(1.0);
        let mut remaining = 1.0f64;
        while remaining > 0.0 {
            let base = linalg_norm(&x);
            if base == 0.0 {
                break;
            }
            self.matvec(&x, &mut g1, 1.0);
            self.matvec(&g1, &mut g2, 1.0);
            let rho = (linalg_norm(&g1) / base).max((linalg_norm(&g2) / base).sqrt());
            let mut h = if rho > 0.0 { (REACH / rho).max(h_min) } else { remaining };
            loop {
                h = h.min(remaining);
                if self.taylor_step(&x, &g1, &g2, h, base, &mut step, &mut term, &mut next) || h <= h_min {
                    break;
                }
                h = (0.5 * h).max(h_min);
            }
            core::mem::swap(&mut x, &mut step);
            remaining = if h >= remaining { 0.0 } else { remaining - h };
        }
        x
    }

    /// `out = exp(hG) x` given `g1 = Gx`, `g2 = G²x`; `false` if the series
    /// did not converge within 80 terms.
    #[allow(clippy::too_many_arguments)]
    fn taylor_step(&self, x: &[C64], g1: &[C64], g2: &[C64], h: f64, base: f64, out: &mut [C64], term: &mut Vec<C64>, next: &mut Vec<C64>) -> bool {
        let h2 = 0.5 * h * h;
        for i in 0..self.dim {
            term[i] = g2[i] * h2;
            out[i] = x[i] + g1[i] * h + term[i];
        }
        let mut small = 0;
        for k in 3..80 {
            self.matvec(term, next, h / k as f64);
            core::mem::swap(term, next);
            for (a, b) in out.iter_mut().zip(term.iter()) {
                *a += *b;
            }
            if linalg_norm(term) <= 1e-17 * base {
                small += 1;
                if small == 2 {
                    return true;
                }
            } else {
                small = 0;
            }
        }
        false
    }
}

fn linalg_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Dense `exp(G)` on one mode, computed at `d_work ≥ d` and cropped to `d × d`.
pub fn dense_unitary(g: &Generator, d: usize, d_work: usize) -> DMatrix<C64> {
    let u = linalg::expm(&g.dense(d_work));
    u.view((0, 0), (d, d)).into_owned()
}

/// `x = a + a†`, `p = −i a + i a†` for the quadrature index `i` (mode `i / 2`).
pub(crate) fn quadrature(i: usize) -> [(C64, Ladder); 2] {
    let m = i / 2;
    if i % 2 == 0 {
        [(C64::new(1.0, 0.0), Ladder::a(m)), (C64::new(1.0, 0.0), Ladder::adag(m))]
    } else {
        [(C64::new(0.0, -1.0), Ladder::a(m)), (C64::new(0.0, 1.0), Ladder::adag(m))]
    }
}

/// Generator `−i·½ xᵀ H x` of a quadratic Hamiltonian, with mode labels
/// remapped through `modes`.
pub(crate) fn quadratic_generator(h: &DMatrix<f64>, modes: &[usize]) -> Generator {
    let mut g = Generator::new();
    let n2 = h.nrows();
    for i in 0..n2 {
        for j in 0..n2 {
            let hij = h[(i, j)];
            if hij == 0.0 {
                continue;
            }
            for (ci, li) in quadrature(i) {
                for (cj, lj) in quadrature(j) {
                    let c = C64::new(0.0, -0.5 * hij) * ci * cj;
                    let li = Ladder { mode: modes[li.mode], dag: li.dag };
                    let lj = Ladder { mode: modes[lj.mode], dag: lj.dag };
                    g.push(c, vec![li, lj]);
                }
            }
        }
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expm_action_matches_dense_exponential() {
        let mut g = Generator::new();
        g.push(C64::new(0.3, 0.1), vec![Ladder::adag(0)]);
        g.push(C64::new(-0.3, 0.1), vec![Ladder::a(0)]);
        g.push(C64::new(0.2, 0.0), vec![Ladder::a(0), Ladder::a(0)]);
        g.push(C64::new(-0.2, 0.0), vec![Ladder::adag(0), Ladder::adag(0)]);
        let d = 20;
        let dense = linalg::expm(&g.dense(d));
        let mut v = vec![C64::new(0.0, 0.0); d];
        v[1] = C64::new(1.0, 0.0);
        v[2] = C64::new(0.0, 0.5);
        let w = g.compile(&[d]).expm_action(&v);
        let w2 = &dense * nalgebra::DVector::from_vec(v);
        for i in 0..d {
            assert!((w[i] - w2[i]).norm() < 1e-12);
        }
    }

    /// Large generator norm, low-energy vector: the adaptive substeps must
    /// agree with the dense exponential of a two-mode beamsplitter and a
    /// strong squeezer.
    #[test]
    fn expm_action_with_large_norm() {
        let d = 24;
        let mut bs = Generator::new();
        bs.push(C64::new(0.9, 0.0), vec![Ladder::adag(0), Ladder::a(1)]);
        bs.push(C64::new(-0.9, 0.0), vec![Ladder::a(0), Ladder::adag(1)]);
        let mut v = vec![C64::new(0.0, 0.0); d * d];
        v[0] = C64::new(0.6, 0.0);
        v[d + 2] = C64::new(0.0, 0.64);
        v[3 * d] = C64::new(0.48, 0.0);
        let sp = bs.compile(&[d, d]);
        assert!(sp.norm1() > 20.0);
        let w = sp.expm_action(&v);
        let mut dense = DMatrix::zeros(d * d, d * d);
        for &(j, i, c) in &sp.entries {
            dense[(j as usize, i as usize)] += c;
        }
        let w2 = linalg::expm(&dense) * nalgebra::DVector::from_vec(v);
        let err = (0..d * d).map(|i| (w[i] - w2[i]).norm()).fold(0.0, f64::max);
        assert!(err < 1e-12, "{err:e}");

        let d = 80;
        let mut sq = Generator::new();
        sq.push(C64::new(0.35, 0.0), vec![Ladder::a(0), Ladder::a(0)]);
        sq.push(C64::new(-0.35, 0.0), vec![Ladder::adag(0), Ladder::adag(0)]);
        let mut v = vec![C64::new(0.0, 0.0); d];
        v[1] = C64::new(1.0, 0.0);
        let w = sq.compile(&[d]).expm_action(&v);
        let w2 = linalg::expm(&sq.dense(d)) * nalgebra::DVector::from_vec(v);
        let err = (0..d).map(|i| (w[i] - w2[i]).norm()).fold(0.0, f64::max);
        assert!(err < 1e-12, "{err:e}");
    }

    #[test]
    fn merging_duplicate_words() {
        let mut g = Generator::new();
        g.push(C64::new(1.0, 0.0), vec![Ladder::a(0)]);
        g.push(C64::new(-1.0, 0.0), vec![Ladder::a(0)]);
        assert_eq!(g.terms.len(), 1);
        assert_eq!(g.terms[0].0, C64::new(0.0, 0.0));
    }
}
