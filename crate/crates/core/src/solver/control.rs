//! The discrete control `q = c − z/γ` and its projection onto the admissible set.

use serde::{Deserialize, Serialize};

use crate::error::{FracError, Result};
use crate::frac::ExponentPair;
use crate::jacobi::{jacobi_norm_sq, JacobiParams};
use crate::transforms::SpectralFunction;

/// `q(x) = constant − z(x)/γ` with `z = ω^{σ*,σ} Σ ẑ_n Q_n^{σ*,σ}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControlFunction {
    pub constant: f64,
    pub z_part: SpectralFunction,
    pub gamma: f64,
}

impl ControlFunction {
    pub fn zero(pair: ExponentPair, n: usize, gamma: f64) -> Result<Self> {
        let frame = JacobiParams::new(pair.sigma_star, pair.sigma)?;
        Ok(Self {
            constant: 0.0,
            z_part: SpectralFunction::new((pair.sigma_star, pair.sigma), frame, vec![0.0; n + 1])?,
            gamma,
        })
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.constant - self.z_part.eval(x) / self.gamma
    }

    /// `∫ z dx = ẑ_0 h_0^{σ*,σ}`.
    pub fn z_mean(&self) -> f64 {
        let h0 = jacobi_norm_sq(0, self.z_part.params).expect("validated parameters");
        self.z_part.coeffs.first().copied().unwrap_or(0.0) * h0
    }

    /// `∫ q dx`.
    pub fn integral(&self) -> f64 {
        self.constant - self.z_mean() / self.gamma
    }

    /// The coefficient vector `[c, −ẑ_0/γ, −ẑ_1/γ, …]` used by the outer stopping test.
    pub fn coefficient_vector(&self) -> Vec<f64> {
        std::iter::once(self.constant)
            .chain(self.z_part.coeffs.iter().map(|z| -z / self.gamma))
            .collect()
    }
}

/// `γ q = max{0, z̄} − z` with `z̄ = ẑ_0 h_0^{σ*,σ}`.
pub fn project_control(z: &[f64], pair: ExponentPair, gamma: f64) -> Result<ControlFunction> {
    if !(gamma > 0.0) {
        return Err(FracError::InvalidArgument(format!("gamma must be positive, got {gamma}")));
    }
    let frame = JacobiParams::new(pair.sigma_star, pair.sigma)?;
    let mean = z.first().copied().unwrap_or(0.0) * jacobi_norm_sq(0, frame)?;
    Ok(ControlFunction {
        constant: mean.max(0.0) / gamma,
        z_part: SpectralFunction::new((pair.sigma_star, pair.sigma), frame, z.to_vec())?,
        gamma,
    })
}

/// `‖a − b‖∞ / ‖a‖∞`, or the absolute difference when `a` vanishes.
pub fn relative_change(a: &[f64], b: &[f64]) -> f64 {
    let len = a.len().max(b.len());
    let get = |v: &[f64], i: usize| v.get(i).copied().unwrap_or(0.0);
    let diff = (0..len).fold(0.0f64, |m, i| m.max((get(a, i) - get(b, i)).abs()));
    let scale = a.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if scale > 0.0 {
        diff / scale
    } else {
        diff
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frac::solve_sigma;
    use crate::jacobi::gauss_jacobi_rule;

    #[test]
    fn zero_adjoint_gives_zero_control() {
        let pair = solve_sigma(0.7, 1.4).unwrap();
        let q = project_control(&[0.0; 5], pair, 1.0).unwrap();
        assert_eq!(q.constant, 0.0);
        assert_eq!(q.eval(0.3), 0.0);
        assert_eq!(q.integral(), 0.0);
    }

    #[test]
    fn negative_mean_is_strictly_admissible() {
        let pair = solve_sigma(0.7, 1.4).unwrap();
        let q = project_control(&[-0.8, 0.0, 0.0], pair, 2.0).unwrap();
        assert_eq!(q.constant, 0.0);
        let zbar = -0.8 * jacobi_norm_sq(0, JacobiParams::new(pair.sigma_star, pair.sigma).unwrap()).unwrap();
        assert!((q.integral() + zbar / 2.0).abs() < 1e-15);
        assert!(q.integral() > 0.0);
    }

    #[test]
    fn positive_mean_integrates_to_zero() {
        let pair = solve_sigma(0.7, 1.8).unwrap();
        let z = [0.9, -0.4, 0.25, 0.1, -0.05];
        let q = project_control(&z, pair, 1.0).unwrap();
        assert_eq!(q.integral(), 0.0);
        // Independent check: quadrature of q with the (σ*,σ) weight rule.
        let frame = JacobiParams::new(pair.sigma_star, pair.sigma).unwrap();
        let rule = gauss_jacobi_rule(10, frame).unwrap();
        let z_int = rule.integrate(|x| q.z_part.eval_poly(x));
        let total = q.constant - z_int / q.gamma;
        assert!(total.abs() < 1e-14);
    }

    #[test]
    fn relative_change_handles_zero_reference() {
        assert_eq!(relative_change(&[0.0, 0.0], &[0.5, 0.0]), 0.5);
        assert_eq!(relative_change(&[2.0, 1.0], &[1.0, 1.0]), 0.5);
    }
}
