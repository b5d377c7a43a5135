//! Preconditioned fixed-point iteration `x ← x + P⁻¹(b − A x)`.

use serde::{Deserialize, Serialize};

use crate::error::{FracError, Result};
use crate::operators::Tridiagonal;

/// Iterations without a new best residual after which the solve is declared stagnant.
const STAGNATION_WINDOW: usize = 12;
/// Growth over the best residual that counts as divergence.
const DIVERGENCE_FACTOR: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixedPointOutcome {
    pub x: Vec<f64>,
    pub iterations: usize,
    /// `‖b − A x‖₂ / ‖b‖₂` at the returned iterate.
    pub residual: f64,
    pub converged: bool,
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Runs until the relative residual reaches `tol`, `max_iter` is exhausted or
/// the residual stops improving; returns the best iterate seen.
pub fn fixed_point_solve<F>(
    apply: F,
    precond: &Tridiagonal,
    rhs: &[f64],
    x0: &[f64],
    tol: f64,
    max_iter: usize,
) -> Result<FixedPointOutcome>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    if rhs.len() != x0.len() {
        return Err(FracError::SizeMismatch {
            expected: rhs.len(),
            got: x0.len(),
        });
    }
    let rhs_norm = norm2(rhs);
    if rhs_norm == 0.0 {
        return Ok(FixedPointOutcome {
            x: vec![0.0; rhs.len()],
            iterations: 0,
            residual: 0.0,
            converged: true,
        });
    }
    let residual_of = |x: &[f64]| -> Result<(Vec<f64>, f64)> {
        let ax = apply(x)?;
        let r: Vec<f64> = rhs.iter().zip(&ax).map(|(b, a)| b - a).collect();
        let rel = norm2(&r) / rhs_norm;
        Ok((r, rel))
    };

    let mut x = x0.to_vec();
    let (mut r, mut rel) = residual_of(&x)?;
    let mut best = (x.clone(), rel);
    let mut since_best = 0;
    let mut iterations = 0;
    while rel > tol && iterations < max_iter {
        let step = precond.solve(&r)?;
        for (xi, si) in x.iter_mut().zip(&step) {
            *xi += si;
        }
        iterations += 1;
        (r, rel) = residual_of(&x)?;
        if !rel.is_finite() || rel > DIVERGENCE_FACTOR * best.1 {
            return Err(FracError::Diverged {
                iterations,
                residual: rel,
                best: best.1,
            });
        }
        if rel < best.1 {
            best = (x.clone(), rel);
            since_best = 0;
        } else {
            since_best += 1;
            if since_best >= STAGNATION_WINDOW {
                break;
            }
        }
    }
    let (x, residual) = best;
    Ok(FixedPointOutcome {
        x,
        iterations,
        residual,
        converged: residual <= tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag_system(n: usize) -> (Tridiagonal, Vec<f64>) {
        let d: Vec<f64> = (0..n).map(|i| 2.0 + i as f64).collect();
        (Tridiagonal::new(vec![0.0; n - 1], d.clone(), vec![0.0; n - 1]).unwrap(), d)
    }

    #[test]
    fn zero_rhs_returns_zero_immediately() {
        let (p, _) = diag_system(4);
        let out = fixed_point_solve(|x| Ok(x.to_vec()), &p, &[0.0; 4], &[1.0; 4], 1e-14, 10).unwrap();
        assert_eq!(out.iterations, 0);
        assert_eq!(out.x, vec![0.0; 4]);
    }

    #[test]
    fn exact_preconditioner_converges_in_one_step() {
        let (p, d) = diag_system(6);
        let apply = |x: &[f64]| Ok(x.iter().zip(&d).map(|(a, b)| a * b).collect());
        let rhs: Vec<f64> = (0..6).map(|i| (i as f64).cos()).collect();
        let out = fixed_point_solve(apply, &p, &rhs, &[0.0; 6], 1e-14, 10).unwrap();
        assert_eq!(out.iterations, 1);
        assert!(out.converged);
    }

    #[test]
    fn contraction_converges() {
        let n = 20;
        let (p, d) = diag_system(n);
        // A = P + E with a small off-diagonal perturbation.
        let apply = |x: &[f64]| {
            Ok((0..n)
                .map(|i| d[i] * x[i] + 0.3 * if i + 1 < n { x[i + 1] } else { 0.0 })
                .collect())
        };
        let rhs = vec![1.0; n];
        let out = fixed_point_solve(apply, &p, &rhs, &vec![0.0; n], 1e-14, 200).unwrap();
        assert!(out.converged, "{}", out.residual);
    }

    #[test]
    fn divergence_is_detected() {
        let n = 5;
        let (p, d) = diag_system(n);
        let apply = |x: &[f64]| Ok(x.iter().zip(&d).map(|(a, b)| -2.0 * a * b).collect());
        let err = fixed_point_solve(apply, &p, &[1.0; 5], &[0.0; 5], 1e-14, 100).unwrap_err();
        assert!(matches!(err, FracError::Diverged { .. }));
    }
}
