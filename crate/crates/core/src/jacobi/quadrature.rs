//! Gauss-Jacobi quadrature on `[0, 1]` for the weight `(1 − x)^γ x^β`.
//!
//! Nodes come from the eigenvalues of the symmetric Jacobi matrix (Golub-Welsch).
//! Each node is then polished by a Newton step on `P_n` and the weight is
//! taken from the closed-form Christoffel expression, which stays accurate for
//! the tiny weights near the endpoints where squared eigenvector components
//! lose relative precision.

use rayon::prelude::*;

use crate::error::{FracError, Result};
use crate::jacobi::gamma::{beta, gamma_ratio};
use crate::jacobi::JacobiParams;

#[derive(Debug, Clone)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub params: JacobiParams,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `Σ w_i f(x_i) ≈ ∫₀¹ ω^{γ,β} f dx`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// Monic recurrence coefficients of `P_n^{a,b}` on `[−1, 1]`:
/// diagonal entries and squared off-diagonal entries of the Jacobi matrix.
fn jacobi_matrix(npts: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let s = a + b;
    let mut diag = Vec::with_capacity(npts);
    let mut off_sq = Vec::with_capacity(npts);
    for n in 0..npts {
        let nf = n as f64;
        let d = if n == 0 {
            (b - a) / (s + 2.0)
        } else {
            (b * b - a * a) / ((2.0 * nf + s) * (2.0 * nf + s + 2.0))
        };
        diag.push(d);
        // off_sq[n] couples rows n and n+1 (uses index n+1 in the usual notation)
        let m = nf + 1.0;
        let two_ms = 2.0 * m + s;
        let e = if n + 1 == 1 {
            // (m + s)/(2m + s − 1) = 1 at m = 1
            4.0 * (1.0 + a) * (1.0 + b) / (two_ms * two_ms * (two_ms + 1.0))
        } else {
            4.0 * m * (m + a) * (m + b) * (m + s) / (two_ms * two_ms * (two_ms + 1.0) * (two_ms - 1.0))
        };
        off_sq.push(e);
    }
    (diag, off_sq)
}

/// Implicit QL on a symmetric tridiagonal matrix. `d` holds the diagonal, `e[i]`
/// couples `i` and `i+1`. On return `d` holds the eigenvalues and `z` the first
/// component of each normalized eigenvector.
fn tridiagonal_ql(d: &mut [f64], e: &mut [f64], z: &mut [f64]) -> std::result::Result<(), ()> {
    let n = d.len();
    if n == 0 {
        return Ok(());
    }
    e[n - 1] = 0.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m < n - 1 {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 80 {
                return Err(());
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut deflated = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                let zf = z[i + 1];
                z[i + 1] = s * z[i] + c * zf;
                z[i] = c * z[i] - s * zf;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// `P_n(t)` and `P_{n-1}(t)` for the classical Jacobi polynomial.
fn jacobi_pair(n: usize, a: f64, b: f64, t: f64) -> (f64, f64) {
    let s = a + b;
    let mut prev = 1.0;
    if n == 0 {
        return (1.0, 0.0);
    }
    let mut cur = (a + 1.0) + 0.5 * (s + 2.0) * (t - 1.0);
    for k in 1..n {
        let kf = k as f64;
        let two_ks = 2.0 * kf + s;
        let denom = 2.0 * (kf + 1.0) * (kf + s + 1.0) * two_ks;
        let next = ((two_ks + 1.0) * ((two_ks + 2.0) * two_ks * t + a * a - b * b) * cur
            - 2.0 * (kf + a) * (kf + b) * (two_ks + 2.0) * prev)
            / denom;
        prev = cur;
        cur = next;
    }
    (cur, prev)
}

/// Gauss-Jacobi rule with `npts` nodes, exact for polynomials of degree
/// `≤ 2·npts − 1` against `(1 − x)^γ x^β` on `[0, 1]`.
pub fn gauss_jacobi_rule(npts: usize, p: JacobiParams) -> Result<QuadratureRule> {
    let p = JacobiParams::new(p.gamma, p.beta)?;
    if npts == 0 {
        return Err(FracError::InvalidArgument("quadrature needs at least one node".into()));
    }
    let (a, b) = (p.gamma, p.beta);
    let s = a + b;
    let (mut d, off_sq) = jacobi_matrix(npts, a, b);
    let mut e: Vec<f64> = off_sq.iter().map(|v| v.sqrt()).collect();
    let mut z = vec![0.0; npts];
    z[0] = 1.0;
    tridiagonal_ql(&mut d, &mut e, &mut z).map_err(|_| FracError::EigenSolve { npts })?;

    let mut order: Vec<usize> = (0..npts).collect();
    order.sort_by(|&i, &j| d[i].total_cmp(&d[j]));

    let nf = npts as f64;
    let christoffel = gamma_ratio(nf + a + 1.0, nf + 1.0)? * gamma_ratio(nf + b + 1.0, nf + s + 1.0)?;
    let two_ns = 2.0 * nf + s;
    let coupling = 2.0 * (nf + a) * (nf + b) / two_ns;

    let polish = |&i: &usize| -> (f64, f64) {
        let mut t = d[i];
        for _ in 0..3 {
            let (pn, pm) = jacobi_pair(npts, a, b, t);
            let one_minus_t2 = (1.0 - t) * (1.0 + t);
            // (2n+s)(1−t²) P_n' = n[(a−b) − (2n+s)t] P_n + 2(n+a)(n+b) P_{n−1}
            let dp = (nf * ((a - b) - two_ns * t) * pn / two_ns + coupling * pm) / one_minus_t2;
            if dp == 0.0 || !dp.is_finite() {
                break;
            }
            let step = pn / dp;
            let candidate = t - step;
            if candidate.abs() >= 1.0 {
                break;
            }
            t = candidate;
            if step.abs() <= 2.0 * f64::EPSILON * (1.0 - t.abs()).max(f64::MIN_POSITIVE) {
                break;
            }
        }
        let (_, pn_1) = jacobi_pair(npts, a, b, t);
        // At a root: (1−t²) P_n' = 2(n+a)(n+b) P_{n−1} / (2n+s)
        let one_minus_t2 = (1.0 - t) * (1.0 + t);
        let scaled = coupling * pn_1;
        (0.5 * (1.0 + t), christoffel * one_minus_t2 / (scaled * scaled))
    };
    let (nodes, mut weights): (Vec<f64>, Vec<f64>) = order.par_iter().map(polish).unzip();

    if nodes.iter().any(|x| !(*x > 0.0 && *x < 1.0)) || weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
        return Err(FracError::EigenSolve { npts });
    }
    // Remove the slowly drifting common factor from recurrence rounding.
    let mass = beta(a + 1.0, b + 1.0)?;
    let total: f64 = weights.iter().sum();
    let scale = mass / total;
    weights.iter_mut().for_each(|w| *w *= scale);
    Ok(QuadratureRule { nodes, weights, params: p })
}

/// Squared first eigenvector components scaled by the total mass: the plain
/// Golub-Welsch weights, exposed for cross-checking the polished weights.
pub fn golub_welsch_weights(npts: usize, p: JacobiParams) -> Result<(Vec<f64>, Vec<f64>)> {
    let (mut d, off_sq) = jacobi_matrix(npts, p.gamma, p.beta);
    let mut e: Vec<f64> = off_sq.iter().map(|v| v.sqrt()).collect();
    let mut z = vec![0.0; npts];
    z[0] = 1.0;
    tridiagonal_ql(&mut d, &mut e, &mut z).map_err(|_| FracError::EigenSolve { npts })?;
    let mass = beta(p.gamma + 1.0, p.beta + 1.0)?;
    let mut pairs: Vec<(f64, f64)> = d
        .iter()
        .zip(&z)
        .map(|(&t, &v)| (0.5 * (1.0 + t), mass * v * v))
        .collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    Ok(pairs.into_iter().unzip())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jacobi::{eval_jacobi, jacobi_norm_sq};

    #[test]
    fn one_point_legendre_is_midpoint() {
        let r = gauss_jacobi_rule(1, JacobiParams::new(0.0, 0.0).unwrap()).unwrap();
        assert!((r.nodes[0] - 0.5).abs() < 1e-16);
        assert!((r.weights[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn weights_sum_to_beta_function() {
        for &(a, b) in &[(0.0, 0.0), (0.6, 0.6), (-0.4, -0.4), (0.8, -0.5), (1.6, 1.6), (-0.5, -0.5)] {
            let p = JacobiParams::new(a, b).unwrap();
            let mass = beta(a + 1.0, b + 1.0).unwrap();
            for npts in [1, 2, 5, 17, 64, 300, 1000] {
                let r = gauss_jacobi_rule(npts, p).unwrap();
                let total: f64 = r.weights.iter().sum();
                assert!((total / mass - 1.0).abs() < 1e-13, "({a},{b}) npts={npts}: {total} vs {mass}");
                assert!(r.nodes.windows(2).all(|w| w[0] < w[1]));
                assert!(r.nodes.iter().all(|&x| x > 0.0 && x < 1.0));
            }
        }
    }

    #[test]
    fn orthogonality_and_norms() {
        let p = JacobiParams::new(0.6, 0.6).unwrap();
        let r = gauss_jacobi_rule(6, p).unwrap();
        let cross = r.integrate(|x| eval_jacobi(3, p, x).unwrap() * eval_jacobi(5, p, x).unwrap());
        assert!(cross.abs() < 1e-13);
        let sq = r.integrate(|x| eval_jacobi(4, p, x).unwrap().powi(2));
        assert!((sq - jacobi_norm_sq(4, p).unwrap()).abs() < 1e-13);
    }

    #[test]
    fn norm_of_degree_seven_via_quadrature() {
        let p = JacobiParams::new(0.6, 0.6).unwrap();
        let r = gauss_jacobi_rule(8, p).unwrap();
        let sq = r.integrate(|x| eval_jacobi(7, p, x).unwrap().powi(2));
        let h = jacobi_norm_sq(7, p).unwrap();
        assert!((sq / h - 1.0).abs() < 1e-12);
    }

    #[test]
    fn polished_weights_agree_with_eigenvector_weights() {
        let p = JacobiParams::new(0.8829, 0.3171).unwrap();
        let r = gauss_jacobi_rule(40, p).unwrap();
        let (nodes, w) = golub_welsch_weights(40, p).unwrap();
        for i in 0..40 {
            assert!((r.nodes[i] - nodes[i]).abs() < 1e-13);
            assert!((r.weights[i] - w[i]).abs() < 1e-12 * w.iter().cloned().fold(0.0, f64::max));
        }
    }

    #[test]
    fn orthogonality_grid() {
        let params = [(0.0, 0.0), (0.6, 0.6), (0.8829, 0.3171), (-0.4, -0.4)];
        for &(a, b) in &params {
            let p = JacobiParams::new(a, b).unwrap();
            for m in 0..=20usize {
                for n in 0..=20usize {
                    let npts = (m + n).div_ceil(2) + 1;
                    let r = gauss_jacobi_rule(npts, p).unwrap();
                    let v = r.integrate(|x| eval_jacobi(m, p, x).unwrap() * eval_jacobi(n, p, x).unwrap());
                    if m == n {
                        let h = jacobi_norm_sq(n, p).unwrap();
                        assert!((v / h - 1.0).abs() < 1e-12, "({a},{b}) n={n}");
                    } else {
                        assert!(v.abs() < 1e-12, "({a},{b}) m={m} n={n}: {v}");
                    }
                }
            }
        }
    }
}
