//! Truncated Fock-basis states.

use alloc::vec;
use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector};
#[allow(unused_imports)]
use num_traits::Float;

use super::basis::{inner, norm_sqr, occupation, strides, total_dim};
use crate::error::{invalid_arg, invalid_state};
use crate::{linalg, Error, Result, C64};

/// Numerical thresholds of the Fock backend.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FockConfig {
    /// Largest truncation deficit accepted when building states.
    pub build_tol: f64,
    /// Largest accumulated deficit accepted after gates and maps.
    pub op_tol: f64,
    /// Eigenvalues at or below this are dropped from entropies.
    pub entropy_clamp: f64,
    /// `σ` eigenvalues at or below this are outside the support.
    pub support_tol: f64,
}

impl Default for FockConfig {
    fn default() -> Self {
        Self {
            build_tol: 1e-8,
            op_tol: 1e-6,
            entropy_clamp: 1e-12,
            support_tol: 1e-12,
        }
    }
}

/// Default per-mode cutoff.
pub const DEFAULT_CUTOFF: usize = 40;

/// Named states with closed-form Fock amplitudes.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum StateKind {
    Vacuum,
    Fock(usize),
    Coherent(C64),
    Thermal(f64),
    /// Two-mode squeezed vacuum with `N_S` photons per mode.
    Tmsv(f64),
    /// Even cat state `∝ |α⟩ + |−α⟩`.
    Cat(C64),
}

impl StateKind {
    pub fn n_modes(&self) -> usize {
        if matches!(self, StateKind::Tmsv(_)) {
            2
        } else {
            1
        }
    }

    fn check(&self) -> Result<()> {
        match *self {
            StateKind::Thermal(n) | StateKind::Tmsv(n) if !(n >= 0.0 && n.is_finite()) => {
                Err(invalid_arg!("mean photon number must be finite and >= 0, got {n}"))
            }
            StateKind::Coherent(a) | StateKind::Cat(a) if !(a.re.is_finite() && a.im.is_finite()) => {
                Err(invalid_arg!("non-finite amplitude"))
            }
            StateKind::Cat(a) if a.norm() == 0.0 => Err(invalid_arg!("cat state needs a nonzero amplitude")),
            _ => Ok(()),
        }
    }

    /// Weight outside a per-mode cutoff `d`.
    fn deficit(&self, d: usize) -> f64 {
        match *self {
            StateKind::Vacuum => 0.0,
            StateKind::Fock(n) => {
                if n < d {
                    0.0
                } else {
                    1.0
                }
            }
            StateKind::Coherent(a) => (1.0 - norm_sqr(&coherent_amplitudes(a, d))).max(0.0),
            StateKind::Cat(a) => (1.0 - norm_sqr(&cat_amplitudes(a, d))).max(0.0),
            StateKind::Thermal(n) | StateKind::Tmsv(n) => {
                if n == 0.0 {
                    0.0
                } else {
                    (n / (n + 1.0)).powi(d as i32)
                }
            }
        }
    }
}

impl core::str::FromStr for StateKind {
    type Err = Error;

    /// Parses `vacuum`, `fock:n`, `coherent:re[,im]`, `thermal:N`, `tmsv:NS`
    /// or `cat:re[,im]`; the colon may be omitted (`fock1`).
    fn from_str(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        let split = spec.find(|c: char| c == ':' || c.is_ascii_digit() || c == '-' || c == '.');
        let (name, args) = match split {
            Some(i) => (&spec[..i], spec[i..].trim_start_matches(':')),
            None => (spec, ""),
        };
        let nums: Vec<f64> = if args.is_empty() {
            Vec::new()
        } else {
            args.split(',')
                .map(|t| t.trim().parse::<f64>().map_err(|_| invalid_arg!("bad number {t:?} in state spec {spec:?}")))
                .collect::<Result<_>>()?
        };
        let complex = |nums: &[f64]| -> Result<C64> {
            match nums {
                [re] => Ok(C64::new(*re, 0.0)),
                [re, im] => Ok(C64::new(*re, *im)),
                _ => Err(invalid_arg!("state spec {spec:?} needs re[,im]")),
            }
        };
        let one = |nums: &[f64]| -> Result<f64> {
            match nums {
                [x] => Ok(*x),
                _ => Err(invalid_arg!("state spec {spec:?} needs one parameter")),
            }
        };
        let kind = match name {
            "vacuum" | "vac" if nums.is_empty() => StateKind::Vacuum,
            "fock" => {
                let n = one(&nums)?;
                if n < 0.0 || n.fract() != 0.0 {
                    return Err(invalid_arg!("Fock index must be a nonnegative integer"));
                }
                StateKind::Fock(n as usize)
            }
            "coherent" => StateKind::Coherent(complex(&nums)?),
            "thermal" => StateKind::Thermal(one(&nums)?),
            "tmsv" => StateKind::Tmsv(one(&nums)?),
            "cat" => StateKind::Cat(complex(&nums)?),
            _ => return Err(invalid_arg!("unknown state spec {spec:?}")),
        };
        kind.check()?;
        Ok(kind)
    }
}

/// `e^{−|α|²/2} αⁿ/√n!` for `n < d`.
pub fn coherent_amplitudes(alpha: C64, d: usize) -> Vec<C64> {
    let mut v = Vec::with_capacity(d);
    v.push(C64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0));
    for n in 1..d {
        let prev = v[n - 1];
        v.push(prev * alpha / (n as f64).sqrt());
    }
    v
}

fn cat_amplitudes(alpha: C64, d: usize) -> Vec<C64> {
    let norm = 1.0 / (2.0 * (1.0 + (-2.0 * alpha.norm_sqr()).exp())).sqrt();
    coherent_amplitudes(alpha, d)
        .into_iter()
        .enumerate()
        .map(|(n, c)| if n % 2 == 0 { c * (2.0 * norm) } else { C64::new(0.0, 0.0) })
        .collect()
}

/// Storage of a Fock-basis state.
#[derive(Debug, Clone, PartialEq)]
pub enum FockData {
    Ket(Vec<C64>),
    Density(DMatrix<C64>),
    /// Low-rank density `Σ_k |ψ_k⟩⟨ψ_k|` with unnormalized members.
    Mixture(Vec<Vec<C64>>),
}

/// Representation tag of a [`FockArray`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum FockKind {
    Ket,
    Density,
    Mixture,
}

/// A state on the product basis `⊗_m {|0⟩…|d_m−1⟩}` (mode 0 most significant).
///
/// `trace_deficit` is the weight lost to truncation so far. It equals
/// `1 − trace` unless the array was renormalized after a post-selection.
#[derive(Debug, Clone, PartialEq)]
pub struct FockArray {
    dims: Vec<usize>,
    data: FockData,
    trace_deficit: f64,
}

impl FockArray {
    fn check_dims(dims: &[usize], len: usize) -> Result<()> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(invalid_arg!("every mode needs a positive dimension"));
        }
        if total_dim(dims) != len {
            return Err(invalid_arg!("data length {len} does not match dimensions {dims:?}"));
        }
        Ok(())
    }

    /// Wraps a ket; the deficit is `1 − ‖ψ‖²`.
    pub fn from_ket(dims: &[usize], ket: Vec<C64>) -> Result<Self> {
        Self::check_dims(dims, ket.len())?;
        let n = norm_sqr(&ket);
        if !n.is_finite() || n > 1.0 + 1e-9 {
            return Err(invalid_state!("ket norm² {n} exceeds 1"));
        }
        Ok(Self { dims: dims.to_vec(), data: FockData::Ket(ket), trace_deficit: (1.0 - n).max(0.0) })
    }

    /// Wraps a density matrix; the deficit is `1 − Tr ρ`.
    pub fn from_density(dims: &[usize], rho: DMatrix<C64>) -> Result<Self> {
        Self::check_dims(dims, rho.nrows())?;
        if rho.ncols() != rho.nrows() {
            return Err(invalid_arg!("density matrix must be square"));
        }
        let t = linalg::trace_re(&rho);
        if linalg::hermiticity_defect(&rho) > 1e-10 * t.abs().max(1.0) {
            return Err(invalid_state!("density matrix is not Hermitian"));
        }
        if !t.is_finite() || t > 1.0 + 1e-9 {
            return Err(invalid_state!("density trace {t} exceeds 1"));
        }
        Ok(Self { dims: dims.to_vec(), data: FockData::Density(rho), trace_deficit: (1.0 - t).max(0.0) })
    }

    /// Wraps a mixture `Σ_k |ψ_k⟩⟨ψ_k|`; the deficit is `1 − Σ_k ‖ψ_k‖²`.
    pub fn from_mixture(dims: &[usize], kets: Vec<Vec<C64>>) -> Result<Self> {
        if kets.is_empty() {
            return Err(invalid_arg!("mixture needs at least one member"));
        }
        for k in &kets {
            Self::check_dims(dims, k.len())?;
        }
        let t: f64 = kets.iter().map(|k| norm_sqr(k)).sum();
        if !t.is_finite() || t > 1.0 + 1e-9 {
            return Err(invalid_state!("mixture trace {t} exceeds 1"));
        }
        Ok(Self { dims: dims.to_vec(), data: FockData::Mixture(kets), trace_deficit: (1.0 - t).max(0.0) })
    }

    pub(crate) fn with_deficit(dims: Vec<usize>, data: FockData, trace_deficit: f64) -> Self {
        Self { dims, data, trace_deficit }
    }

    pub fn n_modes(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        total_dim(&self.dims)
    }

    pub fn data(&self) -> &FockData {
        &self.data
    }

    pub fn kind(&self) -> FockKind {
        match self.data {
            FockData::Ket(_) => FockKind::Ket,
            FockData::Density(_) => FockKind::Density,
            FockData::Mixture(_) => FockKind::Mixture,
        }
    }

    pub fn trace_deficit(&self) -> f64 {
        self.trace_deficit
    }

    pub fn trace(&self) -> f64 {
        match &self.data {
            FockData::Ket(k) => norm_sqr(k),
            FockData::Density(r) => linalg::trace_re(r),
            FockData::Mixture(ks) => ks.iter().map(|k| norm_sqr(k)).sum(),
        }
    }

    /// Copy rescaled to unit trace; the deficit is kept.
    pub fn normalized(&self) -> Result<Self> {
        let t = self.trace();
        if !(t > 0.0) {
            return Err(Error::ZeroProbability(t));
        }
        let s = 1.0 / t.sqrt();
        let data = match &self.data {
            FockData::Ket(k) => FockData::Ket(k.iter().map(|z| z * s).collect()),
            FockData::Density(r) => FockData::Density(r * C64::new(1.0 / t, 0.0)),
            FockData::Mixture(ks) => FockData::Mixture(ks.iter().map(|k| k.iter().map(|z| z * s).collect()).collect()),
        };
        Ok(Self { dims: self.dims.clone(), data, trace_deficit: self.trace_deficit })
    }

    /// Dense density matrix (unnormalized, as stored).
    pub fn to_density(&self) -> DMatrix<C64> {
        match &self.data {
            FockData::Ket(k) => outer(k),
            FockData::Density(r) => r.clone(),
            FockData::Mixture(ks) => {
                let n = self.dim();
                let psi = DMatrix::from_fn(n, ks.len(), |i, j| ks[j][i]);
                &psi * psi.adjoint()
            }
        }
    }

    /// Members `ψ_k` with `ρ = Σ_k |ψ_k⟩⟨ψ_k|`; densities are diagonalized.
    pub fn kets(&self) -> Vec<Vec<C64>> {
        match &self.data {
            FockData::Ket(k) => vec![k.clone()],
            FockData::Mixture(ks) => ks.clone(),
            FockData::Density(r) => {
                let (vals, vecs) = linalg::hermitian_eigen(r);
                let top = vals.iter().copied().fold(0.0, f64::max);
                (0..vals.len())
                    .filter(|&i| vals[i] > 1e-15 * top.max(1e-300))
                    .map(|i| vecs.column(i).iter().map(|z| z * vals[i].sqrt()).collect())
                    .collect()
            }
        }
    }

    /// Re-expresses a mixture with at most `rank` orthogonal members.
    pub fn compressed(&self) -> Self {
        let FockData::Mixture(ks) = &self.data else {
            return self.clone();
        };
        if ks.len() == 1 {
            return Self { dims: self.dims.clone(), data: FockData::Ket(ks[0].clone()), trace_deficit: self.trace_deficit };
        }
        let gram = gram(ks);
        let (vals, vecs) = linalg::hermitian_eigen(&gram);
        let top = vals.iter().copied().fold(0.0, f64::max);
        let mut members = Vec::new();
        for i in 0..vals.len() {
            if vals[i] <= 1e-15 * top {
                continue;
            }
            let mut v = vec![C64::new(0.0, 0.0); self.dim()];
            for (k, ket) in ks.iter().enumerate() {
                let c = vecs[(k, i)];
                for (x, y) in v.iter_mut().zip(ket) {
                    *x += c * y;
                }
            }
            members.push(v);
        }
        let data = if members.len() == 1 {
            FockData::Ket(members.pop().unwrap_or_default())
        } else {
            FockData::Mixture(members)
        };
        Self { dims: self.dims.clone(), data, trace_deficit: self.trace_deficit }
    }

    /// Spectrum of the normalized state (descending, may contain tiny negatives).
    pub fn spectrum(&self) -> Result<Vec<f64>> {
        let t = self.trace();
        if !(t > 0.0) {
            return Err(Error::ZeroProbability(t));
        }
        let mut vals = match &self.data {
            FockData::Ket(_) => vec![1.0],
            FockData::Density(r) => {
                if linalg::hermiticity_defect(r) > 1e-10 * t.max(1.0) {
                    return Err(invalid_state!("density matrix is not Hermitian"));
                }
                linalg::hermitian_eigenvalues(r).into_iter().map(|x| x / t).collect()
            }
            FockData::Mixture(ks) => {
                if ks.len() > self.dim() {
                    linalg::hermitian_eigenvalues(&self.to_density()).into_iter().map(|x| x / t).collect()
                } else {
                    linalg::hermitian_eigenvalues(&gram(ks)).into_iter().map(|x| x / t).collect()
                }
            }
        };
        if vals.iter().any(|&x| x < -1e-9) {
            return Err(invalid_state!("state has a negative eigenvalue"));
        }
        vals.sort_by(|a, b| b.total_cmp(a));
        Ok(vals)
    }

    /// `Tr ρ²` of the normalized state.
    pub fn purity(&self) -> Result<f64> {
        Ok(self.spectrum()?.iter().map(|x| x * x).sum())
    }

    /// Tensor product; mode order is `self` then `other`.
    pub fn tensor(&self, other: &Self) -> Self {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        let deficit = 1.0 - (1.0 - self.trace_deficit) * (1.0 - other.trace_deficit);
        let data = match (&self.data, &other.data) {
            (FockData::Density(_), _) | (_, FockData::Density(_)) => {
                FockData::Density(self.to_density().kronecker(&other.to_density()))
            }
            _ => {
                let (a, b) = (self.kets(), other.kets());
                let mut ks = Vec::with_capacity(a.len() * b.len());
                for x in &a {
                    for y in &b {
                        ks.push(kron(x, y));
                    }
                }
                if ks.len() == 1 {
                    FockData::Ket(ks.pop().unwrap_or_default())
                } else {
                    FockData::Mixture(ks)
                }
            }
        };
        Self { dims, data, trace_deficit: deficit.max(0.0) }
    }

    /// Reduced density matrix on the modes in `keep` (in the given order).
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        let n = self.n_modes();
        if keep.is_empty() || keep.iter().any(|&k| k >= n) {
            return Err(invalid_arg!("keep set must be nonempty and within {n} modes"));
        }
        for (i, a) in keep.iter().enumerate() {
            if keep[i + 1..].contains(a) {
                return Err(invalid_arg!("keep set has repeated modes"));
            }
        }
        let traced: Vec<usize> = (0..n).filter(|m| !keep.contains(m)).collect();
        let kdims: Vec<usize> = keep.iter().map(|&k| self.dims[k]).collect();
        let tdims: Vec<usize> = traced.iter().map(|&k| self.dims[k]).collect();
        let (kd, td) = (total_dim(&kdims), total_dim(&tdims));
        let st = strides(&self.dims);
        let kst = strides(&kdims);
        let tst = if tdims.is_empty() { vec![] } else { strides(&tdims) };
        // index maps full → (kept, traced)
        let split: Vec<(usize, usize)> = (0..self.dim())
            .map(|i| {
                let ki = keep.iter().enumerate().map(|(p, &m)| occupation(i, &st, &self.dims, m) * kst[p]).sum();
                let ti = traced.iter().enumerate().map(|(p, &m)| occupation(i, &st, &self.dims, m) * tst[p]).sum();
                (ki, ti)
            })
            .collect();
        let mut rho = DMatrix::zeros(kd, kd);
        match &self.data {
            FockData::Density(r) => {
                let mut inv = vec![0usize; kd * td];
                for (i, &(k, t)) in split.iter().enumerate() {
                    inv[k * td + t] = i;
                }
                for a in 0..kd {
                    for b in 0..kd {
                        let mut s = C64::new(0.0, 0.0);
                        for t in 0..td {
                            s += r[(inv[a * td + t], inv[b * td + t])];
                        }
                        rho[(a, b)] = s;
                    }
                }
            }
            _ => {
                for ket in self.kets() {
                    let mut m = DMatrix::<C64>::zeros(kd, td);
                    for (i, &(k, t)) in split.iter().enumerate() {
                        m[(k, t)] = ket[i];
                    }
                    rho += &m * m.adjoint();
                }
            }
        }
        Ok(Self { dims: kdims, data: FockData::Density(rho), trace_deficit: self.trace_deficit })
    }
}

pub(crate) fn outer(k: &[C64]) -> DMatrix<C64> {
    let v = DVector::from_column_slice(k);
    &v * v.adjoint()
}

pub(crate) fn kron(x: &[C64], y: &[C64]) -> Vec<C64> {
    let mut out = Vec::with_capacity(x.len() * y.len());
    for a in x {
        for b in y {
            out.push(a * b);
        }
    }
    out
}

fn gram(ks: &[Vec<C64>]) -> DMatrix<C64> {
    let n = ks.len();
    let mut g = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let z = inner(&ks[i], &ks[j]);
            g[(i, j)] = z;
            g[(j, i)] = z.conj();
        }
    }
    g
}

/// Smallest cutoff `≥ d` for which `kind` has deficit at most `bound`.
fn suggest_cutoff(kind: &StateKind, d: usize, bound: f64) -> usize {
    let mut c = d.max(2);
    while c < 100_000 && kind.deficit(c) > bound {
        c += (c / 4).max(1);
    }
    c
}

/// Builds a named state with per-mode cutoff `d`.
pub fn build_state(kind: StateKind, d: usize, cfg: &FockConfig) -> Result<FockArray> {
    kind.check()?;
    if d < 2 {
        return Err(invalid_arg!("cutoff must be at least 2, got {d}"));
    }
    let deficit = kind.deficit(d);
    if deficit > cfg.build_tol {
        return Err(Error::Truncation { deficit, bound: cfg.build_tol, suggested_cutoff: suggest_cutoff(&kind, d, cfg.build_tol) });
    }
    let zero = C64::new(0.0, 0.0);
    let arr = match kind {
        StateKind::Vacuum | StateKind::Fock(_) => {
            let n = if let StateKind::Fock(n) = kind { n } else { 0 };
            let mut v = vec![zero; d];
            v[n] = C64::new(1.0, 0.0);
            FockArray::from_ket(&[d], v)?
        }
        StateKind::Coherent(a) => FockArray::from_ket(&[d], coherent_amplitudes(a, d))?,
        StateKind::Cat(a) => FockArray::from_ket(&[d], cat_amplitudes(a, d))?,
        StateKind::Thermal(nbar) => {
            let mut rho = DMatrix::zeros(d, d);
            let x = nbar / (nbar + 1.0);
            for k in 0..d {
                rho[(k, k)] = C64::new(x.powi(k as i32) / (nbar + 1.0), 0.0);
            }
            FockArray::from_density(&[d], rho)?
        }
        StateKind::Tmsv(ns) => {
            let lambda = (ns / (ns + 1.0)).sqrt();
            let c = (1.0 - lambda * lambda).sqrt();
            let mut v = vec![zero; d * d];
            for k in 0..d {
                v[k * d + k] = C64::new(c * lambda.powi(k as i32), 0.0);
            }
            FockArray::from_ket(&[d, d], v)?
        }
    };
    Ok(arr)
}

/// Von Neumann entropy in bits of the normalized state.
pub fn von_neumann_entropy(rho: &FockArray, cfg: &FockConfig) -> Result<f64> {
    if rho.kind() == FockKind::Ket {
        return Ok(0.0);
    }
    Ok(linalg::entropy_bits(rho.spectrum()?, cfg.entropy_clamp))
}

/// Relative entropy `S(ρ‖σ)` in bits; `+∞` when more than `√support_tol` of
/// `ρ` lies where `σ` has eigenvalues at or below `support_tol`.
pub fn relative_entropy(rho: &FockArray, sigma: &FockArray, cfg: &FockConfig) -> Result<f64> {
    if rho.dims() != sigma.dims() {
        return Err(invalid_arg!("relative entropy needs matching dimensions"));
    }
    let (tr, ts) = (rho.trace(), sigma.trace());
    if !(tr > 0.0 && ts > 0.0) {
        return Err(invalid_state!("relative entropy needs states with positive trace"));
    }
    let r = rho.to_density() * C64::new(1.0 / tr, 0.0);
    let s = sigma.to_density() * C64::new(1.0 / ts, 0.0);
    for m in [&r, &s] {
        if linalg::hermiticity_defect(m) > 1e-9 {
            return Err(invalid_state!("density matrix is not Hermitian"));
        }
    }
    let (sv, su) = linalg::hermitian_eigen(&s);
    if sv.iter().any(|&x| x < -1e-9) {
        return Err(invalid_state!("σ has a negative eigenvalue"));
    }
    let r_in_s = su.adjoint() * &r * &su;
    let mut cross = 0.0;
    let mut outside = 0.0;
    for k in 0..sv.len() {
        let w = r_in_s[(k, k)].re;
        if sv[k] <= cfg.support_tol {
            outside += w.max(0.0);
            continue;
        }
        cross -= w * sv[k].log2();
    }
    // A truncated σ loses its smallest eigenvalues to round-off, so only
    // weight well above that noise floor counts as leaving the support.
    if outside > cfg.support_tol.sqrt() {
        return Ok(f64::INFINITY);
    }
    let rv = linalg::hermitian_eigenvalues(&r);
    if rv.iter().any(|&x| x < -1e-9) {
        return Err(invalid_state!("ρ has a negative eigenvalue"));
    }
    let value = cross - linalg::entropy_bits(rv, cfg.entropy_clamp);
    Ok(if value < 0.0 && value > -1e-9 { 0.0 } else { value })
}
