//! Problem data: coefficients of the state equation, the regularization
//! weight and the source and desired-state functions.

use serde::{Deserialize, Serialize};

use crate::error::{FracError, Result};
use crate::frac::{data_regularity, solve_sigma, ExponentPair};
use crate::transforms::{chebyshev_expand, SpectralFunction};

/// Smooth factor multiplying the `ω^{β,β}` weight of the data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DataFactor {
    Sin,
    Cos,
    One,
    Zero,
    /// Coefficients in the shifted Chebyshev basis `T_n(2x − 1)`.
    Chebyshev(Vec<f64>),
}

impl DataFactor {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            DataFactor::Sin => x.sin(),
            DataFactor::Cos => x.cos(),
            DataFactor::One => 1.0,
            DataFactor::Zero => 0.0,
            DataFactor::Chebyshev(c) => clenshaw_chebyshev(c, 2.0 * x - 1.0),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            DataFactor::Zero => true,
            DataFactor::Chebyshev(c) => c.iter().all(|&v| v == 0.0),
            _ => false,
        }
    }

    /// Expansion in `Q_n^{−1/2,−1/2}` from `m + 1` Chebyshev samples.
    pub fn expand(&self, m: usize) -> SpectralFunction {
        chebyshev_expand(|x| self.eval(x), m)
    }
}

fn clenshaw_chebyshev(c: &[f64], t: f64) -> f64 {
    let (mut b1, mut b2) = (0.0, 0.0);
    for &ck in c.iter().skip(1).rev() {
        let b0 = 2.0 * t * b1 - b2 + ck;
        b2 = b1;
        b1 = b0;
    }
    c.first().copied().unwrap_or(0.0) + t * b1 - b2
}

/// Desired state `u_d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DesiredState {
    /// `ω^{β,β} · factor`, the same family as the source.
    Data(DataFactor),
    /// `ω^{σ,σ*} Σ c_n Q_n^{σ,σ*}`: a function in the state trial space.
    StateCoefficients(Vec<f64>),
}

/// Optimal control problem on `(0, 1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub alpha: f64,
    pub theta: f64,
    /// Advection coefficient.
    pub lambda1: f64,
    /// Reaction coefficient.
    pub lambda2: f64,
    /// Regularization weight of the control cost.
    pub gamma: f64,
    /// Exponent of the `ω^{β,β}` weight on the data.
    pub beta: f64,
    pub source: DataFactor,
    pub desired: DesiredState,
    /// Regularity index of the data; derived from `beta` when absent.
    #[serde(default)]
    pub regularity: Option<f64>,
}

impl ProblemSpec {
    /// Validates the coefficients and returns the singularity exponents.
    pub fn validate(&self) -> Result<ExponentPair> {
        let pair = solve_sigma(self.theta, self.alpha)?;
        if !(self.gamma > 0.0) {
            return Err(FracError::InvalidArgument(format!("gamma must be positive, got {}", self.gamma)));
        }
        if !(self.lambda2 >= 0.0) || !self.lambda1.is_finite() {
            return Err(FracError::InvalidArgument(format!(
                "need finite lambda1 and lambda2 >= 0, got ({}, {})",
                self.lambda1, self.lambda2
            )));
        }
        if !(pair.min_exponent() + self.beta > -1.0) {
            return Err(FracError::InvalidArgument(format!(
                "data weight exponent beta = {} is not integrable against the test functions",
                self.beta
            )));
        }
        Ok(pair)
    }

    /// `λ1 = 0` disables the advection term; such runs are diagnostic only.
    pub fn is_diagnostic(&self) -> bool {
        self.lambda1 == 0.0
    }

    pub fn regularity_index(&self, pair: ExponentPair) -> f64 {
        self.regularity.unwrap_or_else(|| data_regularity(pair, self.beta))
    }

    /// The configuration of the first numerical example with `θ = 0.7`.
    pub fn smooth_example(alpha: f64) -> Self {
        Self {
            alpha,
            theta: 0.7,
            lambda1: 1.0,
            lambda2: 1.0,
            gamma: 1.0,
            beta: 0.0,
            source: DataFactor::Sin,
            desired: DesiredState::Data(DataFactor::Cos),
            regularity: None,
        }
    }

    /// The configuration with singular data `ω^{β,β}` and symmetric `θ = 0.5`.
    pub fn singular_example(alpha: f64, beta: f64) -> Self {
        Self {
            theta: 0.5,
            beta,
            ..Self::smooth_example(alpha)
        }
    }
}
