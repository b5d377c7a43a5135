//! Coefficient-space transforms: Jacobi connection matrices, fast
//! Jacobi-to-Jacobi conversion and Chebyshev expansion of smooth factors.
//!
//! Weight prefactors `ω^{a,b}` are carried as metadata and never sampled.

mod chebyshev;
mod connection;
mod toeplitz;

pub use chebyshev::{chebyshev_coefficients, chebyshev_expand, default_samples};
pub use connection::{
    connection_dense, connection_entry, connection_factored, ConversionForm, ConversionMatrix, ParameterChange,
    ILL_CONDITIONED,
};
pub use toeplitz::{ToeplitzHankel, DEFAULT_RANK_TOL};

use serde::{Deserialize, Serialize};

use crate::error::{FracError, Result};
use crate::jacobi::{weight, JacobiParams, Recurrence};

/// `(1 − x)^a x^b · Σ coeffs[n] Q_n^{params}(x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralFunction {
    pub weight: (f64, f64),
    pub params: JacobiParams,
    pub coeffs: Vec<f64>,
}

impl SpectralFunction {
    pub fn new(weight: (f64, f64), params: JacobiParams, coeffs: Vec<f64>) -> Result<Self> {
        if !(weight.0 > -1.0 && weight.1 > -1.0) {
            return Err(FracError::InvalidArgument(format!(
                "weight exponents must exceed -1, got ({}, {})",
                weight.0, weight.1
            )));
        }
        Ok(Self { weight, params, coeffs })
    }

    /// Plain polynomial series in `Q_n^{params}`.
    pub fn polynomial(params: JacobiParams, coeffs: Vec<f64>) -> Self {
        Self {
            weight: (0.0, 0.0),
            params,
            coeffs,
        }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn recurrence(&self) -> Recurrence {
        Recurrence::new(self.params, self.coeffs.len().saturating_sub(1))
    }

    /// The polynomial part at `x`.
    pub fn eval_poly(&self, x: f64) -> f64 {
        self.recurrence().eval_series(&self.coeffs, x)
    }

    pub fn eval(&self, x: f64) -> f64 {
        weight(self.weight.0, self.weight.1, x) * self.eval_poly(x)
    }

    /// Polynomial part at many points, sharing one recurrence table.
    pub fn eval_poly_many(&self, xs: &[f64]) -> Vec<f64> {
        let rec = self.recurrence();
        xs.iter().map(|&x| rec.eval_series(&self.coeffs, x)).collect()
    }
}

/// Convert a coefficient vector between arbitrary parameter pairs through
/// `(a, b) → (c, b) → (c, d)`. The result has the same length.
pub fn convert_coefficients(coeffs: &[f64], from: JacobiParams, to: JacobiParams) -> Result<Vec<f64>> {
    if coeffs.is_empty() || from == to {
        return Ok(coeffs.to_vec());
    }
    let k = coeffs.len() - 1;
    let mid = JacobiParams::new(to.gamma, from.beta)?;
    let first = connection_factored(k, from, mid)?;
    let second = connection_factored(k, mid, to)?;
    second.apply_transpose(&first.apply_transpose(coeffs)?)
}

/// Re-expand the polynomial part of `f` in `Q_n^{target}`; the weight is unchanged.
pub fn jacobi_to_jacobi(f: &SpectralFunction, target: JacobiParams) -> Result<SpectralFunction> {
    let target = JacobiParams::new(target.gamma, target.beta)?;
    Ok(SpectralFunction {
        weight: f.weight,
        params: target,
        coeffs: convert_coefficients(&f.coeffs, f.params, target)?,
    })
}
