//! Small dense linear-algebra helpers on top of nalgebra.

use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector};
#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result, C64};

/// Eigenvalues of a Hermitian matrix (ascending). Only the lower triangle is read.
pub fn hermitian_eigenvalues(m: &DMatrix<C64>) -> Vec<f64> {
    let mut v: Vec<f64> = hermitian_solve(m, false).0.iter().copied().collect();
    v.sort_by(|a, b| a.total_cmp(b));
    v
}

/// Full eigendecomposition of a Hermitian matrix: `(eigenvalues, eigenvectors as columns)`.
pub fn hermitian_eigen(m: &DMatrix<C64>) -> (DVector<f64>, DMatrix<C64>) {
    let (vals, vecs) = hermitian_solve(m, true);
    (vals, vecs.unwrap_or_else(|| DMatrix::identity(m.nrows(), m.nrows())))
}

/// Householder tridiagonalization followed by implicit QL with Wilkinson-type
/// shifts. Negligible couplings are zeroed before they can underflow, which
/// keeps rank-deficient inputs with rapidly decaying entries finite.
fn hermitian_solve(m: &DMatrix<C64>, vectors: bool) -> (DVector<f64>, Option<DMatrix<C64>>) {
    let n = m.nrows();
    if n == 0 {
        return (DVector::zeros(0), vectors.then(|| DMatrix::zeros(0, 0)));
    }
    let scale = m.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if scale == 0.0 || n == 1 {
        let d = DVector::from_fn(n, |i, _| m[(i, i)].re);
        return (d, vectors.then(|| DMatrix::identity(n, n)));
    }
    let scaled = m * C64::new(1.0 / scale, 0.0);
    let tri = nalgebra::linalg::SymmetricTridiagonal::new(scaled);
    let (mut z, mut d, off) = if vectors {
        let (q, d, e) = tri.unpack();
        (Some(q), d, e)
    } else {
        let (d, e) = tri.unpack_tridiagonal();
        (None, d, e)
    };
    let mut e = alloc::vec![0.0; n];
    e[..n - 1].copy_from_slice(off.as_slice());
    const EPS: f64 = f64::EPSILON;
    const TINY: f64 = 1e-280;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut mm = l;
            while mm < n - 1 {
                let dd = d[mm].abs() + d[mm + 1].abs();
                if e[mm].abs() <= EPS * dd || e[mm].abs() < TINY {
                    e[mm] = 0.0;
                    break;
                }
                mm += 1;
            }
            if mm == l {
                break;
            }
            iter += 1;
            if iter > 200 {
                break;
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[mm] - d[l] + e[l] / (g + if g >= 0.0 { r.abs() } else { -r.abs() });
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut early = false;
            let mut i = mm;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[mm] = 0.0;
                    early = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if let Some(z) = z.as_mut() {
                    let (left, right) = z.as_mut_slice().split_at_mut((i + 1) * n);
                    let col_i = &mut left[i * n..];
                    let col_j = &mut right[..n];
                    for (a, b) in col_i.iter_mut().zip(col_j.iter_mut()) {
                        let f = *b;
                        *b = *a * s + f * c;
                        *a = *a * c - f * s;
                    }
                }
            }
            if early {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[mm] = 0.0;
        }
    }
    d.iter_mut().for_each(|x| *x *= scale);
    (d, z)
}

/// Largest absolute deviation from Hermiticity.
pub fn hermiticity_defect(m: &DMatrix<C64>) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..m.nrows() {
        for j in 0..=i {
            let d = (m[(i, j)] - m[(j, i)].conj()).norm();
            worst = worst.max(d);
        }
    }
    worst
}

/// Applies `f` to the eigenvalues of a real symmetric matrix.
pub fn sym_apply(m: &DMatrix<f64>, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
    let e = m.clone().symmetric_eigen();
    let d = DMatrix::from_diagonal(&e.eigenvalues.map(f));
    &e.eigenvectors * d * e.eigenvectors.transpose()
}

/// Principal square root of a positive-definite symmetric matrix.
pub fn sym_sqrt(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let e = m.clone().symmetric_eigen();
    if e.eigenvalues.iter().any(|&x| !(x > 0.0)) {
        return Err(Error::Numerical("matrix square root of a non-positive-definite matrix".into()));
    }
    Ok(sym_apply(m, |x| x.sqrt()))
}

/// Induced 1-norm (maximum absolute column sum).
pub fn norm1(m: &DMatrix<C64>) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Matrix exponential by scaling and squaring of a truncated Taylor series.
pub fn expm(a: &DMatrix<C64>) -> DMatrix<C64> {
    let n = a.nrows();
    let norm = norm1(a);
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let scale = C64::new(2f64.powi(-squarings), 0.0);
    let b = a * scale;
    let mut result = DMatrix::<C64>::identity(n, n);
    let mut term = DMatrix::<C64>::identity(n, n);
    for k in 1..40 {
        term = &term * &b * C64::new(1.0 / k as f64, 0.0);
        result += &term;
        if norm1(&term) < 1e-18 {
            break;
        }
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

/// Principal logarithm of a (numerically) unitary matrix via its complex Schur form.
pub fn unitary_log(u: &DMatrix<C64>) -> Result<DMatrix<C64>> {
    let schur = nalgebra::linalg::Schur::try_new(u.clone(), 1e-15, 10_000)
        .ok_or_else(|| Error::Numerical("Schur decomposition did not converge".into()))?;
    let (q, t) = schur.unpack();
    let n = t.nrows();
    let mut off = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            off = off.max(t[(i, j)].norm());
        }
    }
    if off > 1e-8 {
        return Err(Error::Numerical("matrix is not normal; no unitary logarithm".into()));
    }
    let logs = DMatrix::from_diagonal(&DVector::from_iterator(
        n,
        (0..n).map(|i| {
            let z = t[(i, i)];
            C64::new(z.norm().ln(), z.arg())
        }),
    ));
    Ok(&q * logs * q.adjoint())
}

/// `-Σ p log2 p` over a list of probabilities, ignoring entries at or below `clamp`.
pub fn entropy_bits(weights: impl IntoIterator<Item = f64>, clamp: f64) -> f64 {
    weights
        .into_iter()
        .filter(|&p| p > clamp)
        .map(|p| -p * p.log2())
        .sum()
}

/// Real part of the trace of a complex square matrix.
pub fn trace_re(m: &DMatrix<C64>) -> f64 {
    (0..m.nrows()).map(|i| m[(i, i)].re).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expm_of_diagonal_generator() {
        let a = DMatrix::from_diagonal(&DVector::from_vec(alloc::vec![
            C64::new(0.0, 1.5),
            C64::new(-2.0, 0.0),
            C64::new(3.0, 0.0)
        ]));
        let e = expm(&a);
        assert!((e[(0, 0)] - C64::new(0.0, 1.5).exp()).norm() < 1e-12);
        assert!((e[(1, 1)] - (-2.0f64).exp()).norm() < 1e-12);
        assert!((e[(2, 2)] - 3.0f64.exp()).norm() < 1e-10);
        assert!(e[(0, 1)].norm() < 1e-14);
    }

    #[test]
    fn expm_of_rotation_generator() {
        // exp([[0, t], [-t, 0]]) is a rotation by t.
        let t = 2.3;
        let a = DMatrix::from_row_slice(2, 2, &[C64::new(0.0, 0.0), C64::new(t, 0.0), C64::new(-t, 0.0), C64::new(0.0, 0.0)]);
        let e = expm(&a);
        assert!((e[(0, 0)].re - t.cos()).abs() < 1e-12);
        assert!((e[(0, 1)].re - t.sin()).abs() < 1e-12);
    }

    #[test]
    fn unitary_log_round_trip() {
        let h = DMatrix::from_row_slice(
            2,
            2,
            &[C64::new(0.3, 0.0), C64::new(0.1, -0.4), C64::new(0.1, 0.4), C64::new(-0.7, 0.0)],
        );
        let u = expm(&(h.clone() * C64::new(0.0, -1.0)));
        let l = unitary_log(&u).unwrap();
        let back = expm(&l);
        assert!((back - u).norm() < 1e-10);
    }

    #[test]
    fn entropy_of_uniform_bits() {
        assert!((entropy_bits([0.25; 4], 1e-12) - 2.0).abs() < 1e-14);
        assert_eq!(entropy_bits([1.0, 0.0], 1e-12), 0.0);
    }
}
