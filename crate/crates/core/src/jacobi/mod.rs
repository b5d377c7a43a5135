//! Shifted Jacobi polynomials `Q_n^{γ,β}(x) = P_n^{γ,β}(2x − 1)` on `[0, 1]`.
//!
//! `γ` is the exponent attached to `(1 − x)` and `β` the exponent attached to
//! `x` in the orthogonality weight `ω^{γ,β}(x) = (1 − x)^γ x^β`. Recurrences
//! are run in the classical variable `t = 2x − 1`.

pub mod gamma;
pub mod quadrature;

use serde::{Deserialize, Serialize};

use crate::error::{FracError, Result};
pub use gamma::{beta, gamma_ratio, ln_gamma, log_gamma_ratio};
pub use quadrature::{gauss_jacobi_rule, QuadratureRule};

/// Jacobi parameters `(γ, β)`, both strictly greater than −1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JacobiParams {
    pub gamma: f64,
    pub beta: f64,
}

impl JacobiParams {
    pub fn new(gamma: f64, beta: f64) -> Result<Self> {
        if !(gamma > -1.0 && beta > -1.0) || !gamma.is_finite() || !beta.is_finite() {
            return Err(FracError::InvalidJacobiParams { gamma, beta });
        }
        Ok(Self { gamma, beta })
    }

    /// Parameters with the two exponents exchanged.
    pub fn swapped(self) -> Self {
        Self {
            gamma: self.beta,
            beta: self.gamma,
        }
    }

    pub fn sum(self) -> f64 {
        self.gamma + self.beta
    }
}

/// Precomputed three-term recurrence `P_{n+1} = (a_n t + b_n) P_n − c_n P_{n−1}`
/// for the classical Jacobi polynomials on `[−1, 1]`.
#[derive(Debug, Clone)]
pub struct Recurrence {
    params: JacobiParams,
    a: Vec<f64>,
    b: Vec<f64>,
    c: Vec<f64>,
}

impl Recurrence {
    /// Coefficients up to degree `n_max`.
    pub fn new(params: JacobiParams, n_max: usize) -> Self {
        let (ga, be) = (params.gamma, params.beta);
        let s = ga + be;
        let mut a = Vec::with_capacity(n_max);
        let mut b = Vec::with_capacity(n_max);
        let mut c = Vec::with_capacity(n_max);
        for n in 0..n_max {
            if n == 0 {
                // P_1 = (γ + 1) + (s + 2)(t − 1)/2
                a.push(0.5 * (s + 2.0));
                b.push(ga + 1.0 - 0.5 * (s + 2.0));
                c.push(0.0);
                continue;
            }
            let nf = n as f64;
            let two_ns = 2.0 * nf + s;
            let denom = 2.0 * (nf + 1.0) * (nf + s + 1.0) * two_ns;
            a.push((two_ns + 1.0) * (two_ns + 2.0) * two_ns / denom);
            b.push((two_ns + 1.0) * (ga * ga - be * be) / denom);
            c.push(2.0 * (nf + ga) * (nf + be) * (two_ns + 2.0) / denom);
        }
        Self { params, a, b, c }
    }

    pub fn params(&self) -> JacobiParams {
        self.params
    }

    pub fn max_degree(&self) -> usize {
        self.a.len()
    }

    /// Fill `out[n] = Q_n(x)` for `n < out.len()`.
    pub fn eval_all(&self, x: f64, out: &mut [f64]) {
        debug_assert!(out.len() <= self.a.len() + 1);
        let t = 2.0 * x - 1.0;
        if out.is_empty() {
            return;
        }
        out[0] = 1.0;
        if out.len() == 1 {
            return;
        }
        out[1] = self.a[0] * t + self.b[0];
        for n in 1..out.len() - 1 {
            out[n + 1] = (self.a[n] * t + self.b[n]) * out[n] - self.c[n] * out[n - 1];
        }
    }

    /// `Q_n(x)` for a single degree.
    pub fn eval(&self, n: usize, x: f64) -> f64 {
        let t = 2.0 * x - 1.0;
        let (mut prev, mut cur) = (0.0, 1.0);
        for k in 0..n {
            let next = (self.a[k] * t + self.b[k]) * cur - self.c[k] * prev;
            prev = cur;
            cur = next;
        }
        cur
    }

    /// `Σ coeffs[n] Q_n(x)`.
    pub fn eval_series(&self, coeffs: &[f64], x: f64) -> f64 {
        if coeffs.is_empty() {
            return 0.0;
        }
        let t = 2.0 * x - 1.0;
        let (mut prev, mut cur) = (0.0, 1.0);
        let mut acc = coeffs[0];
        for (k, &ck) in coeffs.iter().enumerate().skip(1) {
            let next = (self.a[k - 1] * t + self.b[k - 1]) * cur - self.c[k - 1] * prev;
            prev = cur;
            cur = next;
            acc += ck * cur;
        }
        acc
    }
}

/// Value of `Q_n^{γ,β}(x)` by forward recurrence.
pub fn eval_jacobi(n: usize, p: JacobiParams, x: f64) -> Result<f64> {
    JacobiParams::new(p.gamma, p.beta)?;
    if !(0.0..=1.0).contains(&x) {
        return Err(FracError::InvalidArgument(format!(
            "evaluation point {x} outside [0, 1]"
        )));
    }
    Ok(Recurrence::new(p, n).eval(n, x))
}

/// `Σ coeffs[n] Q_n^{γ,β}(x)`.
pub fn eval_series(coeffs: &[f64], p: JacobiParams, x: f64) -> f64 {
    Recurrence::new(p, coeffs.len().saturating_sub(1)).eval_series(coeffs, x)
}

/// `h_n^{γ,β} = ∫₀¹ ω^{γ,β} (Q_n^{γ,β})² dx`.
pub fn jacobi_norm_sq(n: usize, p: JacobiParams) -> Result<f64> {
    JacobiParams::new(p.gamma, p.beta)?;
    let nf = n as f64;
    let s = p.sum();
    if n == 0 {
        // B(γ+1, β+1); the general expression is 0/0 when γ + β = −1.
        return beta(p.gamma + 1.0, p.beta + 1.0);
    }
    // Canonical argument order keeps h_n^{γ,β} and h_n^{β,γ} bitwise equal.
    let (lo, hi) = if p.gamma <= p.beta { (p.gamma, p.beta) } else { (p.beta, p.gamma) };
    let r1 = gamma_ratio(nf + lo + 1.0, nf + 1.0)?;
    let r2 = gamma_ratio(nf + hi + 1.0, nf + s + 1.0)?;
    Ok(r1 * r2 / (2.0 * nf + s + 1.0))
}

/// All norms `h_0..=h_n`.
pub fn jacobi_norms(n_max: usize, p: JacobiParams) -> Result<Vec<f64>> {
    (0..=n_max).map(|n| jacobi_norm_sq(n, p)).collect()
}

/// Result of re-indexing `k`-th derivatives of Jacobi polynomials.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivativeReindex {
    /// `D^k Q_n^{γ,β} = plain_scale · Q_{n−k}^{γ+k,β+k}`.
    pub plain_scale: f64,
    /// `D^k [ω^{γ+k,β+k} Q_{n−k}^{γ+k,β+k}] = weighted_scale · ω^{γ,β} Q_n^{γ,β}`.
    pub weighted_scale: f64,
    pub new_degree: usize,
    pub new_params: JacobiParams,
    /// Set when `k > n`: the derivative is identically zero.
    pub vanishes: bool,
}

/// Derivative identities for shifted Jacobi polynomials (derivatives taken in `x`).
pub fn derivative_reindex(n: usize, k: usize, p: JacobiParams) -> Result<DerivativeReindex> {
    JacobiParams::new(p.gamma, p.beta)?;
    let new_params = JacobiParams {
        gamma: p.gamma + k as f64,
        beta: p.beta + k as f64,
    };
    if k > n {
        return Ok(DerivativeReindex {
            plain_scale: 0.0,
            weighted_scale: 0.0,
            new_degree: 0,
            new_params,
            vanishes: true,
        });
    }
    let s = p.sum();
    let nf = n as f64;
    let plain_scale = if k == 0 {
        1.0
    } else {
        gamma_ratio(nf + k as f64 + s + 1.0, nf + s + 1.0)?
    };
    let mut falling = 1.0;
    for j in 0..k {
        falling *= (n - j) as f64;
    }
    let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
    Ok(DerivativeReindex {
        plain_scale,
        weighted_scale: sign * falling,
        new_degree: n - k,
        new_params,
        vanishes: false,
    })
}

/// `ω^{a,b}(x) = (1 − x)^a x^b`.
pub fn weight(a: f64, b: f64, x: f64) -> f64 {
    (1.0 - x).powf(a) * x.powf(b)
}
