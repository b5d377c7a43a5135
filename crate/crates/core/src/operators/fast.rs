//! Matrix-free mass, advection and Gram products through Jacobi conversions.

use crate::error::{FracError, Result};
use crate::jacobi::{jacobi_norms, JacobiParams};
use crate::transforms::{connection_factored, ConversionMatrix};

/// Conversions for one trial/test orientation `(s, t)`: trial functions
/// `ω^{s,t} Q_n^{s,t}`, test functions `Q_m^{t,s}`.
#[derive(Debug, Clone)]
pub struct FrameTransforms {
    n: usize,
    /// `(s,t) → (α,t) → (α,α)`.
    trial_to_alpha: [ConversionMatrix; 2],
    /// `(t,s) → (t,α) → (α,α)`.
    test_to_alpha: [ConversionMatrix; 2],
    /// `(s,t) → (α−1,t) → (α−1,α−1)`.
    trial_to_alpha_m1: [ConversionMatrix; 2],
    /// `(t−1,s−1) → (t−1,α−1) → (α−1,α−1)`, one degree higher.
    test_to_alpha_m1: [ConversionMatrix; 2],
    norms_alpha: Vec<f64>,
    norms_alpha_m1: Vec<f64>,
}

fn p(a: f64, b: f64) -> Result<JacobiParams> {
    JacobiParams::new(a, b)
}

fn chain(k: usize, from: JacobiParams, mid: JacobiParams, to: JacobiParams) -> Result<[ConversionMatrix; 2]> {
    Ok([connection_factored(k, from, mid)?, connection_factored(k, mid, to)?])
}

impl FrameTransforms {
    pub fn new(n: usize, s: f64, t: f64) -> Result<Self> {
        let a = s + t;
        let am1 = a - 1.0;
        Ok(Self {
            n,
            trial_to_alpha: chain(n, p(s, t)?, p(a, t)?, p(a, a)?)?,
            test_to_alpha: chain(n, p(t, s)?, p(t, a)?, p(a, a)?)?,
            trial_to_alpha_m1: chain(n, p(s, t)?, p(am1, t)?, p(am1, am1)?)?,
            test_to_alpha_m1: chain(n + 1, p(t - 1.0, s - 1.0)?, p(t - 1.0, am1)?, p(am1, am1)?)?,
            norms_alpha: jacobi_norms(n, p(a, a)?)?,
            norms_alpha_m1: jacobi_norms(n, p(am1, am1)?)?,
        })
    }

    fn check(&self, u: &[f64]) -> Result<()> {
        if u.len() != self.n + 1 {
            return Err(FracError::SizeMismatch {
                expected: self.n + 1,
                got: u.len(),
            });
        }
        Ok(())
    }

    /// Coefficients of the trial polynomial in `Q^{α,α}`.
    pub fn trial_in_alpha(&self, u: &[f64]) -> Result<Vec<f64>> {
        self.check(u)?;
        let [c1, c2] = &self.trial_to_alpha;
        c2.apply_transpose(&c1.apply_transpose(u)?)
    }

    /// `M U`.
    pub fn mass(&self, u: &[f64]) -> Result<Vec<f64>> {
        let mut ua = self.trial_in_alpha(u)?;
        for (v, h) in ua.iter_mut().zip(&self.norms_alpha) {
            *v *= h;
        }
        let [e1, e2] = &self.test_to_alpha;
        e1.apply(&e2.apply(&ua)?)
    }

    /// `W U`, of length `N + 2`.
    pub fn advection_aux(&self, u: &[f64]) -> Result<Vec<f64>> {
        self.check(u)?;
        let [f1, f2] = &self.trial_to_alpha_m1;
        let mut ua = f2.apply_transpose(&f1.apply_transpose(u)?)?;
        for (v, h) in ua.iter_mut().zip(&self.norms_alpha_m1) {
            *v *= h;
        }
        // The test basis has one more degree; its (α−1,α−1) coefficient is orthogonal to the trial space.
        ua.push(0.0);
        let [g1, g2] = &self.test_to_alpha_m1;
        g1.apply(&g2.apply(&ua)?)
    }

    /// `D U = Λ Ŵ U`.
    pub fn advection(&self, u: &[f64]) -> Result<Vec<f64>> {
        let w = self.advection_aux(u)?;
        Ok(w.iter().skip(1).enumerate().map(|(m, v)| -((m + 1) as f64) * v).collect())
    }
}

/// Matrix-free Gram product `G Z` with `G[m][n] = (ω^{2a,2b} Q_n^{a,b}, Q_m^{a,b})`,
/// via `Q^{a,b} → Q^{2a,b} → Q^{2a,2b}` and the norms of the target frame.
#[derive(Debug, Clone)]
pub struct GramTransform {
    chain: [ConversionMatrix; 2],
    norms: Vec<f64>,
}

impl GramTransform {
    pub fn new(n: usize, frame: JacobiParams) -> Result<Self> {
        let (a, b) = (frame.gamma, frame.beta);
        Ok(Self {
            chain: chain(n, frame, p(2.0 * a, b)?, p(2.0 * a, 2.0 * b)?)?,
            norms: jacobi_norms(n, p(2.0 * a, 2.0 * b)?)?,
        })
    }

    pub fn apply(&self, z: &[f64]) -> Result<Vec<f64>> {
        let [c1, c2] = &self.chain;
        let mut v = c2.apply_transpose(&c1.apply_transpose(z)?)?;
        for (x, h) in v.iter_mut().zip(&self.norms) {
            *x *= h;
        }
        c1.apply(&c2.apply(&v)?)
    }
}
