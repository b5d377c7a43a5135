//! Experimental orders of convergence.

use crate::error::{FracError, Result};

/// `log(E_i / E_{i+1}) / log(N_{i+1} / N_i)` for consecutive pairs; `None`
/// where either error is not a positive finite number.
pub fn eoc(errors: &[f64], ns: &[usize]) -> Result<Vec<Option<f64>>> {
    if errors.len() != ns.len() {
        return Err(FracError::SizeMismatch {
            expected: ns.len(),
            got: errors.len(),
        });
    }
    if ns.len() < 2 {
        return Err(FracError::InvalidArgument("orders need at least two truncations".into()));
    }
    if ns.windows(2).any(|w| w[1] <= w[0]) {
        return Err(FracError::InvalidArgument("truncations must increase".into()));
    }
    let valid = |e: f64| e.is_finite() && e > 0.0;
    Ok(errors
        .windows(2)
        .zip(ns.windows(2))
        .map(|(e, n)| {
            (valid(e[0]) && valid(e[1])).then(|| (e[0] / e[1]).ln() / (n[1] as f64 / n[0] as f64).ln())
        })
        .collect())
}
