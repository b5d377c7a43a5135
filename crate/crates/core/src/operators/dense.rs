//! Quadrature assembly of the Galerkin matrices.

use nalgebra::DMatrix;

use crate::error::Result;
use crate::jacobi::{gauss_jacobi_rule, JacobiParams, QuadratureRule, Recurrence};

/// Values `Q_j(x_q)` scaled row-wise by `scale[q]`, as an `npts × (deg+1)` table.
fn basis_table(rule: &QuadratureRule, params: JacobiParams, deg: usize, weighted: bool) -> DMatrix<f64> {
    let rec = Recurrence::new(params, deg);
    let mut table = DMatrix::<f64>::zeros(rule.len(), deg + 1);
    let mut row = vec![0.0; deg + 1];
    for (q, (&x, &w)) in rule.nodes.iter().zip(&rule.weights).enumerate() {
        rec.eval_all(x, &mut row);
        let s = if weighted { w } else { 1.0 };
        for (j, v) in row.iter().enumerate() {
            table[(q, j)] = s * v;
        }
    }
    table
}

/// `G[m][n] = Σ_q w_q Q_m^{test}(x_q) Q_n^{trial}(x_q)` for the rule's weight.
pub fn gram_matrix(
    rule: &QuadratureRule,
    test: JacobiParams,
    test_deg: usize,
    trial: JacobiParams,
    trial_deg: usize,
) -> DMatrix<f64> {
    let a = basis_table(rule, test, test_deg, true);
    let b = basis_table(rule, trial, trial_deg, false);
    a.transpose() * b
}

/// `M[m][n] = (ω^{α,α} Q_n^{s,t}, Q_m^{t,s})`.
pub fn mass_matrix(n: usize, s: f64, t: f64) -> Result<DMatrix<f64>> {
    let alpha = s + t;
    let rule = gauss_jacobi_rule(n + 2, JacobiParams::new(alpha, alpha)?)?;
    Ok(gram_matrix(&rule, JacobiParams::new(t, s)?, n, JacobiParams::new(s, t)?, n))
}

/// `W[j][n] = (ω^{α−1,α−1} Q_n^{s,t}, Q_j^{t−1,s−1})`, of size `(N+2) × (N+1)`.
pub fn advection_aux_matrix(n: usize, s: f64, t: f64) -> Result<DMatrix<f64>> {
    let am1 = s + t - 1.0;
    let rule = gauss_jacobi_rule(n + 2, JacobiParams::new(am1, am1)?)?;
    Ok(gram_matrix(
        &rule,
        JacobiParams::new(t - 1.0, s - 1.0)?,
        n + 1,
        JacobiParams::new(s, t)?,
        n,
    ))
}

/// `D[m][n] = −(m+1) W[m+1][n]`: rows of `W` after the first, scaled by `Λ`.
pub fn advection_from_aux(w: &DMatrix<f64>) -> DMatrix<f64> {
    let n1 = w.ncols();
    DMatrix::from_fn(n1, n1, |m, n| -((m + 1) as f64) * w[(m + 1, n)])
}

pub fn advection_matrix(n: usize, s: f64, t: f64) -> Result<DMatrix<f64>> {
    Ok(advection_from_aux(&advection_aux_matrix(n, s, t)?))
}

/// `G[m][n] = (ω^{2a,2b} Q_n^{a,b}, Q_m^{a,b})`: the Gram matrix of the weighted
/// basis `ω^{a,b} Q_n^{a,b}` in plain `L²`.
pub fn weighted_gram_matrix(n: usize, frame: JacobiParams) -> Result<DMatrix<f64>> {
    let rule = gauss_jacobi_rule(n + 2, JacobiParams::new(2.0 * frame.gamma, 2.0 * frame.beta)?)?;
    Ok(gram_matrix(&rule, frame, n, frame, n))
}
