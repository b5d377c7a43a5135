//! Weighted `L²` norms `‖p‖_{ω^{a,b}}` of represented functions and the
//! relative errors `‖p_N − p_ref‖ / ‖p_ref‖`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use rayon::prelude::*;

use crate::error::{FracError, Result};
use crate::jacobi::{beta, gauss_jacobi_rule, jacobi_norms, JacobiParams, QuadratureRule, Recurrence};
use crate::solver::ControlFunction;
use crate::transforms::SpectralFunction;

/// Exponents closer than this are treated as equal when picking the exact route.
const SAME_EXPONENT: f64 = 1e-14;

/// `constant + ω^{weight} Σ c_n Q_n^{params}`: the common shape of states,
/// adjoints and controls.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    pub constant: f64,
    pub part: SpectralFunction,
}

impl Field {
    pub fn spectral(part: SpectralFunction) -> Self {
        Self { constant: 0.0, part }
    }

    /// `q = c − z/γ` with the `1/γ` folded into the coefficients.
    pub fn control(q: &ControlFunction) -> Self {
        let mut part = q.z_part.clone();
        part.coeffs.iter_mut().for_each(|c| *c /= -q.gamma);
        Self {
            constant: q.constant,
            part,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.constant + self.part.eval(x)
    }

    /// `self − other`, zero-padding the shorter coefficient vector.
    pub fn difference(&self, other: &Field) -> Result<Field> {
        let (a, b) = (&self.part, &other.part);
        if a.weight != b.weight || a.params != b.params {
            return Err(FracError::BasisMismatch(format!(
                "weight {:?} / params ({}, {}) vs weight {:?} / params ({}, {})",
                a.weight, a.params.gamma, a.params.beta, b.weight, b.params.gamma, b.params.beta
            )));
        }
        let len = a.len().max(b.len());
        let get = |v: &[f64], i: usize| v.get(i).copied().unwrap_or(0.0);
        let coeffs = (0..len).map(|i| get(&a.coeffs, i) - get(&b.coeffs, i)).collect();
        Ok(Field {
            constant: self.constant - other.constant,
            part: SpectralFunction {
                coeffs,
                ..a.clone()
            },
        })
    }
}

/// Which evaluation route a norm may take.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormRoute {
    /// Coefficientwise sums whenever the weights cancel exactly, quadrature otherwise.
    Exact,
    /// Quadrature for every term.
    Quadrature,
}

fn same(x: f64, y: f64) -> bool {
    (x - y).abs() <= SAME_EXPONENT
}

/// Evaluates weighted norms, sharing Gauss-Jacobi rules between calls.
#[derive(Debug, Default)]
pub struct NormEvaluator {
    rules: Mutex<HashMap<(u64, u64, usize), Arc<QuadratureRule>>>,
}

impl NormEvaluator {
    pub fn new() -> Self {
        Self::default()
    }

    fn rule(&self, npts: usize, a: f64, b: f64) -> Result<Arc<QuadratureRule>> {
        let key = (a.to_bits(), b.to_bits(), npts);
        if let Some(r) = self.rules.lock().expect("rule cache poisoned").get(&key) {
            return Ok(r.clone());
        }
        let rule = Arc::new(gauss_jacobi_rule(npts, JacobiParams::new(a, b)?)?);
        self.rules
            .lock()
            .expect("rule cache poisoned")
            .insert(key, rule.clone());
        Ok(rule)
    }

    /// `Σ w_q g(P(x_q))` over a rule for the weight `ω^{a,b}`.
    fn integrate_poly<G>(&self, f: &SpectralFunction, npts: usize, a: f64, b: f64, g: G) -> Result<f64>
    where
        G: Fn(f64) -> f64 + Sync,
    {
        if !(a > -1.0 && b > -1.0) {
            return Err(FracError::InvalidArgument(format!(
                "weight exponents ({a}, {b}) are not integrable"
            )));
        }
        let rule = self.rule(npts, a, b)?;
        let rec = Recurrence::new(f.params, f.len().saturating_sub(1));
        let values: Vec<f64> = rule
            .nodes
            .par_iter()
            .map(|&x| g(rec.eval_series(&f.coeffs, x)))
            .collect();
        Ok(values.iter().zip(&rule.weights).map(|(v, w)| v * w).sum())
    }

    /// `‖p‖²_{ω^{a,b}}`.
    pub fn norm_sq(&self, p: &Field, a: f64, b: f64, route: NormRoute) -> Result<f64> {
        let f = &p.part;
        let (s, t) = f.weight;
        let (pa, pb) = (f.params.gamma, f.params.beta);
        let deg = f.len().saturating_sub(1);
        let npts = deg + 2;
        let exact = route == NormRoute::Exact;

        // ∫ ω^{a+2s, b+2t} P²
        let (sa, sb) = (a + 2.0 * s, b + 2.0 * t);
        let poly = if f.coeffs.iter().all(|c| *c == 0.0) {
            0.0
        } else if exact && same(sa, pa) && same(sb, pb) {
            let h = jacobi_norms(deg, f.params)?;
            f.coeffs.iter().zip(&h).map(|(c, h)| c * c * h).sum()
        } else {
            self.integrate_poly(f, npts, sa, sb, |v| v * v)?
        };
        if p.constant == 0.0 {
            return Ok(poly);
        }

        if !(a > -1.0 && b > -1.0) {
            return Err(FracError::InvalidArgument(format!(
                "a nonzero constant has no finite norm in weight ({a}, {b})"
            )));
        }
        let constant = p.constant * p.constant * beta(a + 1.0, b + 1.0)?;
        // 2c ∫ ω^{a+s, b+t} P
        let (ca, cb) = (a + s, b + t);
        let cross = if f.coeffs.iter().all(|c| *c == 0.0) {
            0.0
        } else if exact && same(ca, pa) && same(cb, pb) {
            f.coeffs[0] * jacobi_norms(0, f.params)?[0]
        } else {
            self.integrate_poly(f, deg / 2 + 2, ca, cb, |v| v)?
        };
        Ok(constant + 2.0 * p.constant * cross + poly)
    }

    /// `‖p − p_ref‖_{ω^{a,b}} / ‖p_ref‖_{ω^{a,b}}`.
    pub fn relative_error(&self, p: &Field, reference: &Field, a: f64, b: f64, route: NormRoute) -> Result<f64> {
        let diff = p.difference(reference)?;
        let num = self.norm_sq(&diff, a, b, route)?.max(0.0);
        let den = self.norm_sq(reference, a, b, route)?;
        if !(den > 0.0) {
            return Err(FracError::InvalidArgument("reference has zero norm".into()));
        }
        Ok((num / den).sqrt())
    }
}

/// `E^{a,b}(p) = ‖p − p_ref‖_{ω^{a,b}} / ‖p_ref‖_{ω^{a,b}}`.
pub fn weighted_error(p: &Field, reference: &Field, a: f64, b: f64) -> Result<f64> {
    NormEvaluator::new().relative_error(p, reference, a, b, NormRoute::Exact)
}
