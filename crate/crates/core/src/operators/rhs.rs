//! Right-hand sides of the state and adjoint systems.

use nalgebra::{DMatrix, DVector};

use super::dense::weighted_gram_matrix;
use super::fast::GramTransform;
use super::Mode;
use crate::error::{FracError, Result};
use crate::frac::ExponentPair;
use crate::parallel::ordered_fold;
use crate::jacobi::{gauss_jacobi_rule, jacobi_norm_sq, JacobiParams, Recurrence};
use crate::problem::{DesiredState, ProblemSpec};
use crate::solver::ControlFunction;
use crate::transforms::{default_samples, SpectralFunction};

/// `(f, Q_m^{frame})_{ω^{frame}}` for `m = 0..=n`, by a Gauss rule in the combined
/// weight that is exact for the polynomial part of `f`.
pub fn project_onto(f: &SpectralFunction, frame: JacobiParams, n: usize) -> Result<Vec<f64>> {
    if f.is_empty() {
        return Ok(vec![0.0; n + 1]);
    }
    let combined = JacobiParams::new(frame.gamma + f.weight.0, frame.beta + f.weight.1).map_err(|_| {
        FracError::InvalidArgument(format!(
            "weight ({}, {}) is not integrable against frame ({}, {})",
            f.weight.0, f.weight.1, frame.gamma, frame.beta
        ))
    })?;
    let deg_f = f.len() - 1;
    let npts = (n + deg_f) / 2 + 2;
    let rule = gauss_jacobi_rule(npts, combined)?;
    let test = Recurrence::new(frame, n);
    let poly = Recurrence::new(f.params, deg_f);
    let (out, _) = ordered_fold(
        rule.len(),
        || (vec![0.0; n + 1], vec![0.0; n + 1]),
        |(acc, row), q| {
            let fx = rule.weights[q] * poly.eval_series(&f.coeffs, rule.nodes[q]);
            test.eval_all(rule.nodes[q], row);
            for (a, r) in acc.iter_mut().zip(row.iter()) {
                *a += fx * r;
            }
        },
        |(a, _), (b, _)| a.iter_mut().zip(b).for_each(|(x, y)| *x += y),
    );
    Ok(out)
}

/// Weighted Gram operator `(ω^{a,b} Q_n^{a,b}, ω^{a,b} Q_m^{a,b})`.
#[derive(Debug, Clone)]
enum Gram {
    Dense(DMatrix<f64>),
    Fast(Box<GramTransform>),
}

impl Gram {
    fn new(n: usize, frame: JacobiParams, mode: Mode) -> Result<Self> {
        Ok(match mode {
            Mode::Direct => Gram::Dense(weighted_gram_matrix(n, frame)?),
            Mode::Fast => Gram::Fast(Box::new(GramTransform::new(n, frame)?)),
        })
    }

    fn apply(&self, v: &[f64]) -> Result<Vec<f64>> {
        match self {
            Gram::Dense(m) => {
                if v.len() != m.ncols() {
                    return Err(FracError::SizeMismatch {
                        expected: m.ncols(),
                        got: v.len(),
                    });
                }
                Ok((m * DVector::from_column_slice(v)).as_slice().to_vec())
            }
            Gram::Fast(g) => g.apply(v),
        }
    }
}

/// Data projections and Gram operators for one truncation, reused across
/// outer iterations.
#[derive(Debug, Clone)]
pub struct RhsAssembler {
    n: usize,
    gamma: f64,
    /// `h_0^{σ*,σ}`, the integral of `ω^{σ*,σ}`.
    adjoint_mass: f64,
    source: Vec<f64>,
    desired: Vec<f64>,
    adjoint_gram: Gram,
    state_gram: Gram,
}

/// `ω^{β,β}` times the Chebyshev expansion of the factor, for truncation `n`.
pub fn weighted_data(factor: &crate::problem::DataFactor, beta: f64, n: usize) -> SpectralFunction {
    let mut f = factor.expand(default_samples(n));
    f.weight = (beta, beta);
    f
}

impl RhsAssembler {
    pub fn new(spec: &ProblemSpec, pair: ExponentPair, n: usize, mode: Mode) -> Result<Self> {
        let state = JacobiParams::new(pair.sigma, pair.sigma_star)?;
        let adjoint = state.swapped();
        let state_gram = Gram::new(n, state, mode)?;
        let source = if spec.source.is_zero() {
            vec![0.0; n + 1]
        } else {
            project_onto(&weighted_data(&spec.source, spec.beta, n), adjoint, n)?
        };
        let desired = match &spec.desired {
            DesiredState::Data(factor) if factor.is_zero() => vec![0.0; n + 1],
            DesiredState::Data(factor) => project_onto(&weighted_data(factor, spec.beta, n), state, n)?,
            DesiredState::StateCoefficients(c) => {
                let mut padded = c.clone();
                padded.resize(n + 1, 0.0);
                if c.len() > n + 1 {
                    project_onto(&SpectralFunction::new((pair.sigma, pair.sigma_star), state, c.clone())?, state, n)?
                } else {
                    state_gram.apply(&padded)?
                }
            }
        };
        Ok(Self {
            n,
            gamma: spec.gamma,
            adjoint_mass: jacobi_norm_sq(0, adjoint)?,
            source,
            desired,
            adjoint_gram: Gram::new(n, adjoint, mode)?,
            state_gram,
        })
    }

    pub fn len(&self) -> usize {
        self.n + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `F = (f + q, Q_m^{σ*,σ})_{ω^{σ*,σ}}` with `q = c − z/γ`.
    pub fn state_rhs(&self, q: &ControlFunction) -> Result<Vec<f64>> {
        let mut out = self.source.clone();
        out[0] += q.constant * self.adjoint_mass;
        if q.z_part.coeffs.iter().any(|&v| v != 0.0) {
            let z = self.adjoint_gram.apply(&q.z_part.coeffs)?;
            for (o, v) in out.iter_mut().zip(z) {
                *o -= v / self.gamma;
            }
        }
        Ok(out)
    }

    /// `G = (u − u_d, Q_m^{σ,σ*})_{ω^{σ,σ*}}`.
    pub fn adjoint_rhs(&self, u: &[f64]) -> Result<Vec<f64>> {
        let mut out = self.state_gram.apply(u)?;
        for (o, d) in out.iter_mut().zip(&self.desired) {
            *o -= d;
        }
        Ok(out)
    }

    /// The `u_d` contribution to `G`.
    pub fn desired_projection(&self) -> &[f64] {
        &self.desired
    }

    /// The `f` contribution to `F`.
    pub fn source_projection(&self) -> &[f64] {
        &self.source
    }
}

/// Reference assembly of `F` entirely by quadrature.
pub fn assemble_rhs_f(f: &SpectralFunction, q: &ControlFunction, pair: ExponentPair, n: usize) -> Result<Vec<f64>> {
    let adjoint = JacobiParams::new(pair.sigma_star, pair.sigma)?;
    let mut out = project_onto(f, adjoint, n)?;
    let z = project_onto(&q.z_part, adjoint, n)?;
    for (o, v) in out.iter_mut().zip(z) {
        *o -= v / q.gamma;
    }
    out[0] += q.constant * jacobi_norm_sq(0, adjoint)?;
    Ok(out)
}

/// Reference assembly of `G` entirely by quadrature.
pub fn assemble_rhs_g(u: &SpectralFunction, desired: &SpectralFunction, pair: ExponentPair, n: usize) -> Result<Vec<f64>> {
    let state = JacobiParams::new(pair.sigma, pair.sigma_star)?;
    let mut out = project_onto(u, state, n)?;
    for (o, d) in out.iter_mut().zip(project_onto(desired, state, n)?) {
        *o -= d;
    }
    Ok(out)
}
