//! The discrete optimality system
//!
//! ```text
//! (S − λ1 D + λ2 M) U = F      state
//! (S + λ1 D̂ + λ2 Mᵀ) Z = G     adjoint
//! ```
//!
//! with trial functions `ω^{σ,σ*} Q_n^{σ,σ*}` for the state and `ω^{σ*,σ} Q_n^{σ*,σ}`
//! for the adjoint. Both sides share one construction parameterized by an
//! orientation `(s, t)`: the adjoint operators are the state operators with
//! `σ` and `σ*` exchanged (`D̂(σ,σ*) = D(σ*,σ)`, `Mᵀ(σ,σ*) = M(σ*,σ)`).

pub mod dense;
pub mod fast;
mod precond;
pub mod rhs;

pub use fast::{FrameTransforms, GramTransform};
pub use precond::Tridiagonal;
pub use rhs::{assemble_rhs_f, assemble_rhs_g, project_onto, weighted_data, RhsAssembler};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{FracError, Result};
use crate::frac::{lambda_coeff, ExponentPair};
use crate::jacobi::{gauss_jacobi_rule, jacobi_norms, JacobiParams, Recurrence};
use crate::parallel::ordered_fold;

/// Dense matrices with direct solves, or matrix-free applies with fixed-point solves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Direct,
    Fast,
}

impl std::str::FromStr for Mode {
    type Err = FracError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "direct" => Ok(Mode::Direct),
            "fast" => Ok(Mode::Fast),
            other => Err(FracError::InvalidArgument(format!("unknown mode '{other}'"))),
        }
    }
}

/// Which of the two systems an operation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `A = S − λ1 D + λ2 M`.
    State,
    /// `B = S + λ1 D̂ + λ2 Mᵀ`.
    Adjoint,
}

/// Dense matrices of the system.
#[derive(Debug, Clone)]
pub struct DenseParts {
    /// `M`, trial `(σ,σ*)`, test `(σ*,σ)`.
    pub mass: DMatrix<f64>,
    /// `Mᵀ`, assembled independently in the swapped orientation.
    pub mass_adjoint: DMatrix<f64>,
    pub advection: DMatrix<f64>,
    pub advection_adjoint: DMatrix<f64>,
    /// `W`, of size `(N+2) × (N+1)`.
    pub aux: DMatrix<f64>,
}

#[derive(Debug, Clone)]
enum Repr {
    Dense(Box<DenseParts>),
    Fast(Box<[FrameTransforms; 2]>),
}

/// Operators of the discrete system at truncation `N`.
#[derive(Debug, Clone)]
pub struct OperatorSet {
    pub n: usize,
    pub pair: ExponentPair,
    pub lambda1: f64,
    pub lambda2: f64,
    /// `S_n = λ_n h_n^{σ,σ*}`.
    pub stiffness: Vec<f64>,
    /// `h_n^{α,α}`.
    pub norms_alpha: Vec<f64>,
    precond: [Tridiagonal; 2],
    repr: Repr,
}

/// `S_n = λ_{1−θ,n} h_n^{σ,σ*}`, after checking `λ_{1−θ,n} = λ_{θ,n}`.
pub fn stiffness(n: usize, pair: ExponentPair) -> Result<Vec<f64>> {
    let norms = jacobi_norms(n, JacobiParams::new(pair.sigma, pair.sigma_star)?)?;
    let swapped = pair.swapped();
    norms
        .iter()
        .enumerate()
        .map(|(k, h)| {
            let lt = lambda_coeff(k, pair);
            let ls = lambda_coeff(k, swapped);
            if (lt - ls).abs() > 1e-12 * lt.abs() {
                return Err(FracError::InvalidArgument(format!(
                    "eigenvalue symmetry violated at n={k}: {lt} vs {ls}"
                )));
            }
            if !(lt > 0.0) {
                return Err(FracError::InvalidArgument(format!("non-positive eigenvalue {lt} at n={k}")));
            }
            Ok(ls * h)
        })
        .collect()
}

/// First off-diagonals of `D(s,t)`: `(sub, sup)` with `sub[n] = D[n+1][n]`
/// and `sup[n] = D[n][n+1]`, streamed over quadrature nodes in `O(N)` memory.
pub fn advection_band(n: usize, s: f64, t: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let am1 = s + t - 1.0;
    let rule = gauss_jacobi_rule(n + 2, JacobiParams::new(am1, am1)?)?;
    let test = Recurrence::new(JacobiParams::new(t - 1.0, s - 1.0)?, n + 1);
    let trial = Recurrence::new(JacobiParams::new(s, t)?, n);
    // diag_w[k] = W[k+1][k+1], low_w[k] = W[k+2][k]
    let (diag_w, low_w, _, _) = ordered_fold(
        rule.len(),
        || (vec![0.0; n], vec![0.0; n], vec![0.0; n + 2], vec![0.0; n + 1]),
        |(dw, lw, p, r), q| {
            let (x, w) = (rule.nodes[q], rule.weights[q]);
            test.eval_all(x, p);
            trial.eval_all(x, r);
            for k in 0..n {
                dw[k] += w * p[k + 1] * r[k + 1];
                lw[k] += w * p[k + 2] * r[k];
            }
        },
        |(a, b, _, _), (c, d, _, _)| {
            a.iter_mut().zip(c).for_each(|(x, y)| *x += y);
            b.iter_mut().zip(d).for_each(|(x, y)| *x += y);
        },
    );
    let sup = diag_w.iter().enumerate().map(|(k, v)| -((k + 1) as f64) * v).collect();
    let sub = low_w.iter().enumerate().map(|(k, v)| -((k + 2) as f64) * v).collect();
    Ok((sub, sup))
}

fn band_of(d: &DMatrix<f64>) -> (Vec<f64>, Vec<f64>) {
    let n = d.nrows();
    let sub = (0..n - 1).map(|k| d[(k + 1, k)]).collect();
    let sup = (0..n - 1).map(|k| d[(k, k + 1)]).collect();
    (sub, sup)
}

/// `P = diag(S + λ2 h^{α,α}) + sign·λ1·K` with `K` the first off-diagonals of the advection matrix.
fn preconditioner(diag: &[f64], band: (Vec<f64>, Vec<f64>), advection_sign: f64, lambda1: f64) -> Result<Tridiagonal> {
    let (sub, sup) = band;
    let scale = advection_sign * lambda1;
    Tridiagonal::new(
        sub.into_iter().map(|v| scale * v).collect(),
        diag.to_vec(),
        sup.into_iter().map(|v| scale * v).collect(),
    )
}

impl OperatorSet {
    fn common(n: usize, pair: ExponentPair) -> Result<(Vec<f64>, Vec<f64>)> {
        if n < 1 {
            return Err(FracError::InvalidArgument("truncation N must be at least 1".into()));
        }
        let stiff = stiffness(n, pair)?;
        let norms_alpha = jacobi_norms(n, JacobiParams::new(pair.alpha, pair.alpha)?)?;
        Ok((stiff, norms_alpha))
    }

    fn precond_diag(stiff: &[f64], norms_alpha: &[f64], lambda2: f64) -> Vec<f64> {
        stiff.iter().zip(norms_alpha).map(|(s, h)| s + lambda2 * h).collect()
    }

    pub fn assemble(n: usize, pair: ExponentPair, lambda1: f64, lambda2: f64, mode: Mode) -> Result<Self> {
        match mode {
            Mode::Direct => Self::assemble_dense(n, pair, lambda1, lambda2),
            Mode::Fast => Self::assemble_fast(n, pair, lambda1, lambda2),
        }
    }

    /// Every matrix entry by Gauss-Jacobi quadrature.
    pub fn assemble_dense(n: usize, pair: ExponentPair, lambda1: f64, lambda2: f64) -> Result<Self> {
        let (stiff, norms_alpha) = Self::common(n, pair)?;
        let (s, t) = (pair.sigma, pair.sigma_star);
        let aux = dense::advection_aux_matrix(n, s, t)?;
        let advection = dense::advection_from_aux(&aux);
        let advection_adjoint = dense::advection_matrix(n, t, s)?;
        let mass = dense::mass_matrix(n, s, t)?;
        let mass_adjoint = dense::mass_matrix(n, t, s)?;
        let diag = Self::precond_diag(&stiff, &norms_alpha, lambda2);
        let precond = [
            preconditioner(&diag, band_of(&advection), -1.0, lambda1)?,
            preconditioner(&diag, band_of(&advection_adjoint), 1.0, lambda1)?,
        ];
        Ok(Self {
            n,
            pair,
            lambda1,
            lambda2,
            stiffness: stiff,
            norms_alpha,
            precond,
            repr: Repr::Dense(Box::new(DenseParts {
                mass,
                mass_adjoint,
                advection,
                advection_adjoint,
                aux,
            })),
        })
    }

    /// Conversion-based applies; only the preconditioner bands use quadrature.
    pub fn assemble_fast(n: usize, pair: ExponentPair, lambda1: f64, lambda2: f64) -> Result<Self> {
        let (stiff, norms_alpha) = Self::common(n, pair)?;
        let (s, t) = (pair.sigma, pair.sigma_star);
        let frames = [FrameTransforms::new(n, s, t)?, FrameTransforms::new(n, t, s)?];
        let diag = Self::precond_diag(&stiff, &norms_alpha, lambda2);
        let precond = [
            preconditioner(&diag, advection_band(n, s, t)?, -1.0, lambda1)?,
            preconditioner(&diag, advection_band(n, t, s)?, 1.0, lambda1)?,
        ];
        Ok(Self {
            n,
            pair,
            lambda1,
            lambda2,
            stiffness: stiff,
            norms_alpha,
            precond,
            repr: Repr::Fast(Box::new(frames)),
        })
    }

    pub fn mode(&self) -> Mode {
        match self.repr {
            Repr::Dense(_) => Mode::Direct,
            Repr::Fast(_) => Mode::Fast,
        }
    }

    pub fn dense_parts(&self) -> Option<&DenseParts> {
        match &self.repr {
            Repr::Dense(d) => Some(d),
            Repr::Fast(_) => None,
        }
    }

    pub fn frames(&self) -> Option<&[FrameTransforms; 2]> {
        match &self.repr {
            Repr::Fast(f) => Some(f),
            Repr::Dense(_) => None,
        }
    }

    pub fn preconditioner(&self, side: Side) -> &Tridiagonal {
        match side {
            Side::State => &self.precond[0],
            Side::Adjoint => &self.precond[1],
        }
    }

    /// Mass and advection products for one side.
    fn parts(&self, side: Side, x: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        match &self.repr {
            Repr::Dense(d) => {
                let v = DVector::from_column_slice(x);
                let (m, a) = match side {
                    Side::State => (&d.mass, &d.advection),
                    Side::Adjoint => (&d.mass_adjoint, &d.advection_adjoint),
                };
                Ok(((m * &v).as_slice().to_vec(), (a * &v).as_slice().to_vec()))
            }
            Repr::Fast(frames) => {
                let f = match side {
                    Side::State => &frames[0],
                    Side::Adjoint => &frames[1],
                };
                Ok((f.mass(x)?, f.advection(x)?))
            }
        }
    }

    /// `A x` or `B x`.
    pub fn apply(&self, side: Side, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.n + 1 {
            return Err(FracError::SizeMismatch {
                expected: self.n + 1,
                got: x.len(),
            });
        }
        let sign = match side {
            Side::State => -1.0,
            Side::Adjoint => 1.0,
        };
        let (mass, adv) = self.parts(side, x)?;
        Ok((0..=self.n)
            .map(|k| self.stiffness[k] * x[k] + sign * self.lambda1 * adv[k] + self.lambda2 * mass[k])
            .collect())
    }

    /// Dense `A` or `B`; only available in direct mode.
    pub fn system_matrix(&self, side: Side) -> Option<DMatrix<f64>> {
        let d = self.dense_parts()?;
        let (m, a, sign) = match side {
            Side::State => (&d.mass, &d.advection, -1.0),
            Side::Adjoint => (&d.mass_adjoint, &d.advection_adjoint, 1.0),
        };
        let mut out = a * (sign * self.lambda1) + m * self.lambda2;
        for (k, s) in self.stiffness.iter().enumerate() {
            out[(k, k)] += s;
        }
        Some(out)
    }
}
