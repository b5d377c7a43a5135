//! Convergence studies against a fine-resolution reference solution.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::cache::{spec_digest, ReferenceCache};
use super::eoc::eoc;
use super::norms::{Field, NormEvaluator, NormRoute};
use crate::error::{FracError, Result};
use crate::frac::{predict_orders, ExponentPair, OrderPrediction};
use crate::jacobi::{gauss_jacobi_rule, JacobiParams};
use crate::operators::Mode;
use crate::problem::ProblemSpec;
use crate::solver::{optimize, OptimalTriple, SolverConfig};
use crate::transforms::SpectralFunction;

/// Errors of one truncation against the reference.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorSet {
    /// `E^{−σ,−σ*}(u)`.
    pub u_weighted: f64,
    /// `E^{−σ*,−σ}(z)`.
    pub z_weighted: f64,
    /// `E^{−σ*,−σ}(q)`; absent when a nonzero constant part makes the norm infinite.
    pub q_weighted: Option<f64>,
    pub u_l2: f64,
    pub z_l2: f64,
    pub q_l2: f64,
}

/// Observed orders between a truncation and the previous one.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct OrderSet {
    pub u_weighted: Option<f64>,
    pub z_weighted: Option<f64>,
    pub q_weighted: Option<f64>,
    pub u_l2: Option<f64>,
    pub z_l2: Option<f64>,
    pub q_l2: Option<f64>,
}

/// Pointwise check of `γ q = max{0, z̄} − z` and admissibility.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimalityCheck {
    /// `max |γq + z − max{0, z̄}| / max |z|` over the check nodes.
    pub residual: f64,
    /// `∫ q dx`.
    pub control_integral: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyRow {
    pub n: usize,
    pub errors: ErrorSet,
    pub orders: OrderSet,
    pub outer_iterations: usize,
    pub seconds: f64,
    pub optimality: OptimalityCheck,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyFailure {
    pub n: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub spec: ProblemSpec,
    pub spec_digest: String,
    pub pair: ExponentPair,
    pub ns: Vec<usize>,
    pub n_ref: usize,
    pub mode: Mode,
    pub prediction: OrderPrediction,
    pub rows: Vec<StudyRow>,
    pub failures: Vec<StudyFailure>,
    pub reference_iterations: usize,
    pub reference_from_cache: bool,
    pub reference_optimality: OptimalityCheck,
}

impl ConvergenceReport {
    /// The order the state error is expected to approach.
    pub fn expected_order(&self) -> f64 {
        self.prediction.state_order
    }
}

fn state_field(t: &OptimalTriple) -> Result<Field> {
    let p = t.pair;
    Ok(Field::spectral(SpectralFunction::new(
        (p.sigma, p.sigma_star),
        JacobiParams::new(p.sigma, p.sigma_star)?,
        t.state.clone(),
    )?))
}

fn adjoint_field(t: &OptimalTriple) -> Result<Field> {
    let p = t.pair;
    Ok(Field::spectral(SpectralFunction::new(
        (p.sigma_star, p.sigma),
        JacobiParams::new(p.sigma_star, p.sigma)?,
        t.adjoint.clone(),
    )?))
}

/// Errors of `t` against `reference` in the norms reported by a study.
pub fn error_set(t: &OptimalTriple, reference: &OptimalTriple, ev: &NormEvaluator) -> Result<ErrorSet> {
    let p = reference.pair;
    let exact = NormRoute::Exact;
    let (u, u_ref) = (state_field(t)?, state_field(reference)?);
    let (z, z_ref) = (adjoint_field(t)?, adjoint_field(reference)?);
    let (q, q_ref) = (Field::control(&t.control), Field::control(&reference.control));
    let q_weighted = match ev.relative_error(&q, &q_ref, -p.sigma_star, -p.sigma, exact) {
        Ok(e) => Some(e),
        Err(FracError::InvalidArgument(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(ErrorSet {
        u_weighted: ev.relative_error(&u, &u_ref, -p.sigma, -p.sigma_star, exact)?,
        z_weighted: ev.relative_error(&z, &z_ref, -p.sigma_star, -p.sigma, exact)?,
        q_weighted,
        u_l2: ev.relative_error(&u, &u_ref, 0.0, 0.0, exact)?,
        z_l2: ev.relative_error(&z, &z_ref, 0.0, 0.0, exact)?,
        q_l2: ev.relative_error(&q, &q_ref, 0.0, 0.0, exact)?,
    })
}

/// Checks the projection formula at `npts` Gauss-Legendre nodes, taking `z`
/// from the returned adjoint and `z̄` from a separate quadrature.
pub fn optimality_check(t: &OptimalTriple, npts: usize) -> Result<OptimalityCheck> {
    let z = adjoint_field(t)?.part;
    let gamma = t.control.gamma;
    let deg = z.len().saturating_sub(1);
    let z_rule = gauss_jacobi_rule(deg / 2 + 2, z.params)?;
    let z_poly = z.eval_poly_many(&z_rule.nodes);
    let z_mean: f64 = z_poly.iter().zip(&z_rule.weights).map(|(v, w)| v * w).sum();
    let q_rule = gauss_jacobi_rule(t.control.z_part.len() / 2 + 2, t.control.z_part.params)?;
    let q_poly = t.control.z_part.eval_poly_many(&q_rule.nodes);
    let q_z_mean: f64 = q_poly.iter().zip(&q_rule.weights).map(|(v, w)| v * w).sum();

    let legendre = gauss_jacobi_rule(npts, JacobiParams::new(0.0, 0.0)?)?;
    let z_vals: Vec<f64> = legendre.nodes.par_iter().map(|&x| z.eval(x)).collect();
    let q_vals: Vec<f64> = legendre.nodes.par_iter().map(|&x| t.control.eval(x)).collect();
    let target = z_mean.max(0.0);
    let (mut worst, mut scale) = (0.0f64, 0.0f64);
    for (zv, qv) in z_vals.iter().zip(&q_vals) {
        worst = worst.max((gamma * qv + zv - target).abs());
        scale = scale.max(zv.abs());
    }
    Ok(OptimalityCheck {
        residual: if scale > 0.0 { worst / scale } else { worst },
        control_integral: t.control.constant - q_z_mean / gamma,
    })
}

/// Validated study inputs.
fn check_study(ns: &[usize], n_ref: usize) -> Result<()> {
    if ns.is_empty() {
        return Err(FracError::InvalidArgument("a study needs at least one truncation".into()));
    }
    if ns.windows(2).any(|w| w[1] != 2 * w[0]) {
        return Err(FracError::InvalidArgument(format!("truncations {ns:?} must double")));
    }
    let max = *ns.iter().max().expect("nonempty");
    if n_ref < 4 * max {
        return Err(FracError::InvalidArgument(format!(
            "reference truncation {n_ref} must be at least 4 × {max}"
        )));
    }
    Ok(())
}

/// Solves at `n_ref` once (through the cache when given), then at every `N`
/// in parallel, and reports errors and observed orders. Failures at
/// individual truncations are recorded and the remaining rows still reported.
pub fn convergence_study(
    spec: &ProblemSpec,
    ns: &[usize],
    n_ref: usize,
    config: &SolverConfig,
    cache: Option<&ReferenceCache>,
) -> Result<ConvergenceReport> {
    check_study(ns, n_ref)?;
    let pair = spec.validate()?;
    let prediction = predict_orders(pair, spec.regularity_index(pair))?;
    let ref_config = SolverConfig {
        n: n_ref,
        ..config.clone()
    };
    let solve_ref = || optimize(spec, &ref_config);
    let (reference, from_cache) = match cache {
        Some(c) => c.get_or_compute(spec, n_ref, config, solve_ref)?,
        None => (solve_ref()?, false),
    };
    let check_nodes = n_ref + 2;
    let reference_optimality = optimality_check(&reference, check_nodes)?;
    let ev = NormEvaluator::new();

    let outcomes: Vec<Result<StudyRow>> = ns
        .par_iter()
        .map(|&n| {
            let triple = optimize(spec, &SolverConfig { n, ..config.clone() })?;
            Ok(StudyRow {
                n,
                errors: error_set(&triple, &reference, &ev)?,
                orders: OrderSet::default(),
                outer_iterations: triple.stats.outer_iterations,
                seconds: triple.stats.seconds,
                optimality: optimality_check(&triple, check_nodes)?,
            })
        })
        .collect();

    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for (&n, outcome) in ns.iter().zip(outcomes) {
        match outcome {
            Ok(row) => rows.push(row),
            Err(e) => failures.push(StudyFailure { n, message: e.to_string() }),
        }
    }
    fill_orders(&mut rows)?;
    Ok(ConvergenceReport {
        spec: spec.clone(),
        spec_digest: spec_digest(spec),
        pair,
        ns: ns.to_vec(),
        n_ref,
        mode: config.mode,
        prediction,
        rows,
        failures,
        reference_iterations: reference.stats.outer_iterations,
        reference_from_cache: from_cache,
        reference_optimality,
    })
}

/// Orders between consecutive rows whose truncations double.
fn fill_orders(rows: &mut [StudyRow]) -> Result<()> {
    for i in 1..rows.len() {
        let (prev, cur) = (&rows[i - 1], &rows[i]);
        if cur.n != 2 * prev.n {
            continue;
        }
        let ns = [prev.n, cur.n];
        let order = |f: &dyn Fn(&ErrorSet) -> Option<f64>| -> Result<Option<f64>> {
            match (f(&prev.errors), f(&cur.errors)) {
                (Some(a), Some(b)) => Ok(eoc(&[a, b], &ns)?[0]),
                _ => Ok(None),
            }
        };
        let orders = OrderSet {
            u_weighted: order(&|e| Some(e.u_weighted))?,
            z_weighted: order(&|e| Some(e.z_weighted))?,
            q_weighted: order(&|e| e.q_weighted)?,
            u_l2: order(&|e| Some(e.u_l2))?,
            z_l2: order(&|e| Some(e.z_l2))?,
            q_l2: order(&|e| Some(e.q_l2))?,
        };
        rows[i].orders = orders;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn invalid_truncation_lists_are_rejected() {
        assert!(check_study(&[], 64).is_err());
        assert!(check_study(&[64], 64).is_err());
        assert!(check_study(&[16, 48], 256).is_err());
        assert!(check_study(&[16, 32], 127).is_err());
        assert!(check_study(&[16, 32], 128).is_ok());
    }

    #[test]
    fn reference_against_itself_has_zero_error() {
        let spec = ProblemSpec::smooth_example(1.6);
        let t = optimize(&spec, &SolverConfig::with_n(16, Mode::Direct)).unwrap();
        let e = error_set(&t, &t, &NormEvaluator::new()).unwrap();
        assert_eq!(e.u_weighted, 0.0);
        assert_eq!(e.q_l2, 0.0);
        assert_eq!(e.q_weighted, Some(0.0));
    }

    #[test]
    fn small_study_reports_decreasing_errors() {
        let spec = ProblemSpec::smooth_example(1.8);
        let config = SolverConfig::with_n(16, Mode::Fast);
        let report = convergence_study(&spec, &[8, 16, 32], 128, &config, None).unwrap();
        assert!(report.failures.is_empty());
        assert_eq!(report.rows.len(), 3);
        assert!(report.rows[0].orders.u_weighted.is_none());
        for w in report.rows.windows(2) {
            assert!(w[1].errors.u_weighted < w[0].errors.u_weighted);
            assert!(w[1].orders.u_weighted.unwrap() > 0.0);
        }
        assert!(report.reference_optimality.residual < 1e-9);
        assert_eq!(report.expected_order(), report.prediction.state_order);
    }
}
