//! Derivative-free simplex maximization.

use alloc::vec;
use alloc::vec::Vec;

/// Stopping rules for [`nelder_mead_max`].
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NelderMeadOptions {
    pub max_evals: usize,
    /// Stop once the simplex values span less than this.
    pub ftol: f64,
    /// Stop once every vertex is within this of the best one (max-norm).
    pub xtol: f64,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self { max_evals: 200, ftol: 1e-9, xtol: 1e-7 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NelderMeadResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
}

/// Maximizes `f` starting from the simplex `x0, x0 + steps[i] e_i`.
///
/// `f` may return `−∞` (or NaN, treated as `−∞`) for infeasible points; the
/// best vertex is never replaced by a worse one.
pub fn nelder_mead_max(mut f: impl FnMut(&[f64]) -> f64, x0: &[f64], steps: &[f64], opts: &NelderMeadOptions) -> NelderMeadResult {
    let n = x0.len();
    assert_eq!(steps.len(), n, "one step per coordinate");
    let mut evals = 0;
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        let v = f(x);
        if v.is_nan() {
            f64::NEG_INFINITY
        } else {
            v
        }
    };
    let mut pts: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    pts.push(x0.to_vec());
    for i in 0..n {
        let mut p = x0.to_vec();
        p[i] += steps[i];
        pts.push(p);
    }
    let mut vals: Vec<f64> = pts.iter().map(|p| eval(p, &mut evals)).collect();
    let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);
    while evals < opts.max_evals {
        // descending by value: best first
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| vals[b].total_cmp(&vals[a]));
        pts = order.iter().map(|&i| pts[i].clone()).collect();
        vals = order.iter().map(|&i| vals[i]).collect();
        let (best, worst) = (vals[0], vals[n]);
        let spread_x = pts[1..]
            .iter()
            .flat_map(|p| p.iter().zip(&pts[0]).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if best.is_finite() && worst.is_finite() && best - worst <= opts.ftol && spread_x <= opts.xtol.max(1e-14) {
            break;
        }
        if best.is_finite() && worst.is_finite() && best - worst <= opts.ftol * 1e-3 {
            break;
        }
        if spread_x <= opts.xtol {
            break;
        }
        let mut centroid = vec![0.0; n];
        for p in &pts[..n] {
            for (c, x) in centroid.iter_mut().zip(p) {
                *c += x / n as f64;
            }
        }
        let along = |t: f64| -> Vec<f64> { centroid.iter().zip(&pts[n]).map(|(c, w)| c + t * (c - w)).collect() };
        let xr = along(alpha);
        let fr = eval(&xr, &mut evals);
        if fr > vals[0] {
            let xe = along(gamma);
            let fe = eval(&xe, &mut evals);
            if fe > fr {
                pts[n] = xe;
                vals[n] = fe;
            } else {
                pts[n] = xr;
                vals[n] = fr;
            }
            continue;
        }
        if fr > vals[n - 1] {
            pts[n] = xr;
            vals[n] = fr;
            continue;
        }
        let (xc, fc) = if fr > vals[n] {
            let xc = along(rho);
            let fc = eval(&xc, &mut evals);
            (xc, fc)
        } else {
            let xc = along(-rho);
            let fc = eval(&xc, &mut evals);
            (xc, fc)
        };
        if fc > vals[n].max(fr) || (fc > vals[n] && fr <= vals[n]) {
            pts[n] = xc;
            vals[n] = fc;
            continue;
        }
        // shrink toward the best vertex
        for i in 1..=n {
            let p: Vec<f64> = pts[0].iter().zip(&pts[i]).map(|(b, x)| b + sigma * (x - b)).collect();
            vals[i] = eval(&p, &mut evals);
            pts[i] = p;
        }
    }
    let bi = (0..=n).max_by(|&a, &b| vals[a].total_cmp(&vals[b]).then(b.cmp(&a))).unwrap_or(0);
    NelderMeadResult { x: pts[bi].clone(), value: vals[bi], evaluations: evals }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_quadratic_maximum() {
        let f = |x: &[f64]| -(x[0] - 1.0).powi(2) - 3.0 * (x[1] + 0.5).powi(2) + 2.0;
        let r = nelder_mead_max(f, &[0.0, 0.0], &[0.5, 0.5], &NelderMeadOptions { max_evals: 500, ftol: 1e-14, xtol: 1e-9 });
        assert!((r.value - 2.0).abs() < 1e-10);
        assert!((r.x[0] - 1.0).abs() < 1e-4 && (r.x[1] + 0.5).abs() < 1e-4);
    }

    #[test]
    fn respects_infeasible_region() {
        let f = |x: &[f64]| if x[0] > 1.0 { f64::NEG_INFINITY } else { x[0] };
        let r = nelder_mead_max(f, &[0.0], &[0.3], &NelderMeadOptions::default());
        assert!(r.value <= 1.0 && r.value > 0.99);
    }

    #[test]
    fn budget_is_respected() {
        let mut count = 0;
        let r = nelder_mead_max(
            |x: &[f64]| {
                count += 1;
                x.iter().sum::<f64>()
            },
            &[0.0; 3],
            &[1.0; 3],
            &NelderMeadOptions { max_evals: 50, ftol: 0.0, xtol: 0.0 },
        );
        assert!(r.evaluations <= 50 + 4);
        assert_eq!(r.evaluations, count);
    }
}
