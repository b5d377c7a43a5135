//! Connection matrices between shifted Jacobi bases differing in one parameter.
//!
//! `Q_n^{from} = Σ_{j ≤ n} C[n][j] Q_j^{to}`, so `C` is lower triangular and a
//! coefficient vector converts as `c_to = Cᵀ c_from`.

use nalgebra::DMatrix;

use super::toeplitz::{ToeplitzHankel, DEFAULT_RANK_TOL};
use crate::error::{FracError, Result};
use crate::jacobi::gamma::pochhammer_over_factorial;
use crate::jacobi::{gamma_ratio, gauss_jacobi_rule, jacobi_norms, JacobiParams, Recurrence};

/// Entries above this magnitude mark the projection as ill-conditioned.
pub const ILL_CONDITIONED: f64 = 1e12;

/// Which Jacobi parameter the conversion changes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParameterChange {
    /// `(a, β) → (b, β)`: the exponent on `1 − x`.
    First,
    /// `(γ, a) → (γ, b)`: the exponent on `x`.
    Second,
}

#[derive(Debug, Clone)]
pub enum ConversionForm {
    Identity,
    Dense(DMatrix<f64>),
    Factored(ToeplitzHankel),
}

/// Lower-triangular `(k+1) × (k+1)` connection matrix.
#[derive(Debug, Clone)]
pub struct ConversionMatrix {
    pub from: JacobiParams,
    pub to: JacobiParams,
    pub kind: ParameterChange,
    pub form: ConversionForm,
    size: usize,
}

fn classify(from: JacobiParams, to: JacobiParams) -> Result<ParameterChange> {
    if from.beta == to.beta {
        Ok(ParameterChange::First)
    } else if from.gamma == to.gamma {
        Ok(ParameterChange::Second)
    } else {
        Err(FracError::InvalidArgument(format!(
            "conversion ({}, {}) -> ({}, {}) changes both parameters; compose two conversions",
            from.gamma, from.beta, to.gamma, to.beta
        )))
    }
}

impl ConversionMatrix {
    fn identity(k: usize, p: JacobiParams) -> Self {
        Self {
            from: p,
            to: p,
            kind: ParameterChange::First,
            form: ConversionForm::Identity,
            size: k + 1,
        }
    }

    /// Matrix dimension `k + 1`.
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn is_factored(&self) -> bool {
        matches!(self.form, ConversionForm::Factored(_))
    }

    fn check_len(&self, v: &[f64]) -> Result<()> {
        if v.len() != self.size {
            return Err(FracError::SizeMismatch {
                expected: self.size,
                got: v.len(),
            });
        }
        Ok(())
    }

    /// `C · v`.
    pub fn apply(&self, v: &[f64]) -> Result<Vec<f64>> {
        self.check_len(v)?;
        match &self.form {
            ConversionForm::Identity => Ok(v.to_vec()),
            ConversionForm::Dense(m) => Ok((m * nalgebra::DVector::from_column_slice(v)).as_slice().to_vec()),
            ConversionForm::Factored(th) => th.matvec(v),
        }
    }

    /// `Cᵀ · v`: converts `from`-coefficients into `to`-coefficients.
    pub fn apply_transpose(&self, v: &[f64]) -> Result<Vec<f64>> {
        self.check_len(v)?;
        match &self.form {
            ConversionForm::Identity => Ok(v.to_vec()),
            ConversionForm::Dense(m) => Ok((m.transpose() * nalgebra::DVector::from_column_slice(v)).as_slice().to_vec()),
            ConversionForm::Factored(th) => th.matvec_transpose(v),
        }
    }

    /// Dense rendering of whichever form is stored.
    pub fn to_dense(&self) -> DMatrix<f64> {
        match &self.form {
            ConversionForm::Identity => DMatrix::identity(self.size, self.size),
            ConversionForm::Dense(m) => m.clone(),
            ConversionForm::Factored(th) => DMatrix::from_fn(self.size, self.size, |i, j| th.entry(i, j)),
        }
    }
}

/// Quadrature oracle: `C[m][n] = (Q_m^{from}, Q_n^{to})_{ω^{to}} / h_n^{to}`.
pub fn connection_dense(k: usize, from: JacobiParams, to: JacobiParams) -> Result<ConversionMatrix> {
    if from == to {
        return Ok(ConversionMatrix::identity(k, from));
    }
    let kind = classify(from, to)?;
    let size = k + 1;
    let rule = gauss_jacobi_rule(k + 2, to)?;
    let rec_from = Recurrence::new(from, k);
    let rec_to = Recurrence::new(to, k);
    let norms = jacobi_norms(k, to)?;
    let npts = rule.len();
    let mut vf = DMatrix::<f64>::zeros(npts, size);
    let mut vt = DMatrix::<f64>::zeros(npts, size);
    let mut row = vec![0.0; size];
    for (q, (&x, &w)) in rule.nodes.iter().zip(&rule.weights).enumerate() {
        rec_from.eval_all(x, &mut row);
        for (j, r) in row.iter().enumerate() {
            vf[(q, j)] = w * r;
        }
        rec_to.eval_all(x, &mut row);
        for (j, r) in row.iter().enumerate() {
            vt[(q, j)] = *r;
        }
    }
    let mut c = vf.transpose() * vt;
    for m in 0..size {
        for n in 0..size {
            if n > m {
                c[(m, n)] = 0.0;
                continue;
            }
            c[(m, n)] /= norms[n];
            let mag = c[(m, n)].abs();
            if !(mag <= ILL_CONDITIONED) {
                return Err(FracError::IllConditioned { row: m, col: n, magnitude: mag });
            }
        }
    }
    Ok(ConversionMatrix {
        from,
        to,
        kind,
        form: ConversionForm::Dense(c),
        size,
    })
}

/// Closed-form symbols `(left, toeplitz, hankel, right)` for a first-parameter
/// change `(a, β) → (b, β)`:
/// `C[n][j] = Γ(n+β+1)/Γ(n+a+β+1) · (a−b)_{n−j}/(n−j)! · Γ(n+j+a+β+1)/Γ(n+j+b+β+2)
///            · (2j+b+β+1) Γ(j+b+β+1)/Γ(j+β+1)`.
type Symbols = (Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>);

fn first_parameter_symbols(size: usize, a: f64, b: f64, beta: f64) -> Result<Symbols> {
    let left = (0..size)
        .map(|n| gamma_ratio(n as f64 + beta + 1.0, n as f64 + a + beta + 1.0))
        .collect::<Result<Vec<_>>>()?;
    let right = (0..size)
        .map(|j| {
            let jf = j as f64;
            if j == 0 {
                gamma_ratio(b + beta + 2.0, beta + 1.0)
            } else {
                Ok((2.0 * jf + b + beta + 1.0) * gamma_ratio(jf + b + beta + 1.0, jf + beta + 1.0)?)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let toeplitz = pochhammer_over_factorial(a - b, size);
    let hankel = (0..2 * size - 1)
        .map(|j| gamma_ratio(j as f64 + a + beta + 1.0, j as f64 + b + beta + 2.0))
        .collect::<Result<Vec<_>>>()?;
    Ok((left, toeplitz, hankel, right))
}

/// Symbols in the orientation of `kind`: a second-parameter change reflects
/// `x ↦ 1 − x`, which contributes the sign `(−1)^{n+j}` to the diagonals.
fn symbols(size: usize, from: JacobiParams, to: JacobiParams, kind: ParameterChange) -> Result<Symbols> {
    match kind {
        ParameterChange::First => first_parameter_symbols(size, from.gamma, to.gamma, from.beta),
        ParameterChange::Second => {
            let (mut left, toeplitz, hankel, mut right) =
                first_parameter_symbols(size, from.beta, to.beta, from.gamma)?;
            for (n, (l, r)) in left.iter_mut().zip(right.iter_mut()).enumerate() {
                if n % 2 == 1 {
                    *l = -*l;
                    *r = -*r;
                }
            }
            Ok((left, toeplitz, hankel, right))
        }
    }
}

/// Closed-form entry `C[n][j]`, evaluated without the low-rank expansion.
pub fn connection_entry(n: usize, j: usize, from: JacobiParams, to: JacobiParams) -> Result<f64> {
    if j > n {
        return Ok(0.0);
    }
    if from == to {
        return Ok(if n == j { 1.0 } else { 0.0 });
    }
    let kind = classify(from, to)?;
    let (left, toeplitz, hankel, right) = symbols(n + 1, from, to, kind)?;
    Ok(left[n] * toeplitz[n - j] * hankel[n + j] * right[j])
}

/// Factored form from the closed-form symbols, falling back to the dense
/// oracle when the Hankel symbol has a pole or is not a moment sequence.
pub fn connection_factored(k: usize, from: JacobiParams, to: JacobiParams) -> Result<ConversionMatrix> {
    if from == to {
        return Ok(ConversionMatrix::identity(k, from));
    }
    let kind = classify(from, to)?;
    let size = k + 1;
    let built = match symbols(size, from, to, kind) {
        Ok((left, toeplitz, hankel, right)) => {
            ToeplitzHankel::new(left, toeplitz, &hankel, right, DEFAULT_RANK_TOL)?
        }
        Err(FracError::GammaPole(_)) => None,
        Err(e) => return Err(e),
    };
    match built {
        Some(th) => Ok(ConversionMatrix {
            from,
            to,
            kind,
            form: ConversionForm::Factored(th),
            size,
        }),
        None => connection_dense(k, from, to),
    }
}
