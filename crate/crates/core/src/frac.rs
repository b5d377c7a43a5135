//! Boundary singularity exponents, fractional eigenvalues and predicted
//! convergence orders for the two-sided operator `L_θ^α`.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{FracError, Result};
use crate::jacobi::gamma_ratio;

/// Regularity index used for analytic data.
pub const ANALYTIC_REGULARITY: f64 = 100.0;

const BISECTION_STEPS: usize = 40;
const MAX_ITERATIONS: usize = 200;
const BRACKET_GAP: f64 = 1e-12;

/// `(σ, σ*)` with `σ + σ* = α`. Solutions behave like `(1 − x)^σ x^{σ*}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentPair {
    pub sigma: f64,
    pub sigma_star: f64,
    pub alpha: f64,
    pub theta: f64,
}

impl ExponentPair {
    /// The pair for `1 − θ`: the two exponents exchange roles.
    pub fn swapped(self) -> Self {
        Self {
            sigma: self.sigma_star,
            sigma_star: self.sigma,
            alpha: self.alpha,
            theta: 1.0 - self.theta,
        }
    }

    pub fn min_exponent(self) -> f64 {
        self.sigma.min(self.sigma_star)
    }

    /// `|θ (sin π(α−σ) + sin πσ) − sin π(α−σ)|`.
    pub fn residual(self) -> f64 {
        residual(self.theta, self.alpha, self.sigma).abs()
    }
}

fn residual(theta: f64, alpha: f64, sigma: f64) -> f64 {
    let a = (PI * (alpha - sigma)).sin();
    let b = (PI * sigma).sin();
    theta * (a + b) - a
}

fn residual_derivative(theta: f64, alpha: f64, sigma: f64) -> f64 {
    let da = -PI * (PI * (alpha - sigma)).cos();
    let db = PI * (PI * sigma).cos();
    theta * (da + db) - da
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 1.0 && alpha < 2.0) {
        return Err(FracError::InvalidArgument(format!("alpha must lie in (1, 2), got {alpha}")));
    }
    Ok(())
}

/// Solve `θ = sin π(α−σ) / (sin π(α−σ) + sin πσ)` for `σ ∈ [α−1, 1]`.
pub fn solve_sigma(theta: f64, alpha: f64) -> Result<ExponentPair> {
    check_alpha(alpha)?;
    if !(0.0..=1.0).contains(&theta) {
        return Err(FracError::InvalidArgument(format!("theta must lie in [0, 1], got {theta}")));
    }
    let pair = |sigma: f64| ExponentPair {
        sigma,
        sigma_star: alpha - sigma,
        alpha,
        theta,
    };
    if theta == 0.0 {
        return Ok(pair(alpha - 1.0));
    }
    if theta == 0.5 {
        return Ok(pair(0.5 * alpha));
    }
    if theta == 1.0 {
        return Ok(pair(1.0));
    }

    // The residual decreases from θ sin π(α−1) > 0 at σ = α−1 to (θ−1) sin π(α−1) < 0 at σ = 1.
    let mut lo = (alpha - 1.0).max(0.0) + BRACKET_GAP;
    let mut hi = alpha.min(1.0) - BRACKET_GAP;
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if residual(theta, alpha, mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut sigma = 0.5 * (lo + hi);
    for it in BISECTION_STEPS..MAX_ITERATIONS {
        let r = residual(theta, alpha, sigma);
        if r.abs() <= 1e-15 {
            return Ok(pair(sigma));
        }
        let d = residual_derivative(theta, alpha, sigma);
        let mut next = sigma - r / d;
        if !(next > lo && next < hi) || !next.is_finite() {
            next = 0.5 * (lo + hi);
        }
        if residual(theta, alpha, next) > 0.0 {
            lo = next;
        } else {
            hi = next;
        }
        if (next - sigma).abs() <= 4.0 * f64::EPSILON {
            return Ok(pair(next));
        }
        sigma = next;
        if it + 1 == MAX_ITERATIONS {
            break;
        }
    }
    Err(FracError::SigmaNotConverged {
        theta,
        alpha,
        iterations: MAX_ITERATIONS,
    })
}

/// Fractional eigenvalue `λ_{θ,n}^α = −sin(πα)/(sin πσ* + sin πσ) · Γ(n+1+α)/Γ(n+1)`.
pub fn lambda_coeff(n: usize, pair: ExponentPair) -> f64 {
    let prefactor = -(PI * pair.alpha).sin() / ((PI * pair.sigma_star).sin() + (PI * pair.sigma).sin());
    prefactor
        * gamma_ratio(n as f64 + 1.0 + pair.alpha, n as f64 + 1.0)
            .expect("n + 1 + α is positive for α in (1, 2)")
}

/// Predicted regularity index and convergence orders.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrderPrediction {
    pub state_order: f64,
    pub adjoint_order: f64,
    pub control_order: f64,
    pub regularity_s: f64,
}

/// `m = min(r + α, 2α + min(σ, σ*) − 1)`; the arbitrarily small ε is dropped.
pub fn predict_orders(pair: ExponentPair, r: f64) -> Result<OrderPrediction> {
    if !(r >= 0.0) {
        return Err(FracError::InvalidArgument(format!("regularity index must be >= 0, got {r}")));
    }
    let s = 2.0 * pair.alpha + pair.min_exponent() - 1.0;
    let m = (r + pair.alpha).min(s);
    Ok(OrderPrediction {
        state_order: m,
        adjoint_order: m,
        control_order: m,
        regularity_s: s,
    })
}

/// Regularity index of data `ω^{β,β}·(analytic)`: analytic when `β = 0`,
/// otherwise `2β + min(σ, σ*) + 1`.
pub fn data_regularity(pair: ExponentPair, beta: f64) -> f64 {
    if beta == 0.0 {
        ANALYTIC_REGULARITY
    } else {
        (2.0 * beta + pair.min_exponent() + 1.0).max(0.0)
    }
}
