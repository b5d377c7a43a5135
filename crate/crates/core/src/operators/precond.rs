//! Tridiagonal preconditioners and their LU factorization.

use crate::error::{FracError, Result};

/// Tridiagonal matrix with a precomputed LU (Thomas) factorization.
#[derive(Debug, Clone)]
pub struct Tridiagonal {
    /// `sub[i] = T[i+1][i]`.
    sub: Vec<f64>,
    diag: Vec<f64>,
    /// `sup[i] = T[i][i+1]`.
    sup: Vec<f64>,
    /// Multipliers `l[i] = T[i+1][i] / u_i`.
    lower: Vec<f64>,
    /// Pivots `u_i`.
    pivots: Vec<f64>,
}

impl Tridiagonal {
    pub fn new(sub: Vec<f64>, diag: Vec<f64>, sup: Vec<f64>) -> Result<Self> {
        let n = diag.len();
        if n == 0 || sub.len() + 1 != n || sup.len() + 1 != n {
            return Err(FracError::SizeMismatch {
                expected: n.saturating_sub(1),
                got: sub.len().max(sup.len()),
            });
        }
        let scale = diag.iter().fold(0.0f64, |m, d| m.max(d.abs()));
        let mut lower = Vec::with_capacity(n - 1);
        let mut pivots = Vec::with_capacity(n);
        pivots.push(diag[0]);
        for i in 0..n - 1 {
            let u = pivots[i];
            if !(u.abs() > f64::EPSILON * scale) {
                return Err(FracError::Singular(format!("zero pivot {u:e} at row {i} of the preconditioner")));
            }
            let l = sub[i] / u;
            lower.push(l);
            pivots.push(diag[i + 1] - l * sup[i]);
        }
        let last = pivots[n - 1];
        if !(last.abs() > f64::EPSILON * scale) {
            return Err(FracError::Singular(format!("zero pivot {last:e} at row {} of the preconditioner", n - 1)));
        }
        Ok(Self {
            sub,
            diag,
            sup,
            lower,
            pivots,
        })
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn sub(&self) -> &[f64] {
        &self.sub
    }

    pub fn sup(&self) -> &[f64] {
        &self.sup
    }

    /// `T x`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut v = self.diag[i] * x[i];
                if i > 0 {
                    v += self.sub[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    v += self.sup[i] * x[i + 1];
                }
                v
            })
            .collect()
    }

    /// Solve `T x = b`.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let n = self.len();
        if b.len() != n {
            return Err(FracError::SizeMismatch { expected: n, got: b.len() });
        }
        let mut y = b.to_vec();
        for i in 1..n {
            y[i] -= self.lower[i - 1] * y[i - 1];
        }
        y[n - 1] /= self.pivots[n - 1];
        for i in (0..n - 1).rev() {
            y[i] = (y[i] - self.sup[i] * y[i + 1]) / self.pivots[i];
        }
        Ok(y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solve_round_trip() {
        let n = 50;
        let diag: Vec<f64> = (0..n).map(|i| 4.0 + i as f64).collect();
        let sub: Vec<f64> = (0..n - 1).map(|i| -1.0 - 0.1 * i as f64).collect();
        let sup: Vec<f64> = (0..n - 1).map(|i| 0.5 * (i as f64).sin()).collect();
        let t = Tridiagonal::new(sub, diag, sup).unwrap();
        let x: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).cos()).collect();
        let back = t.solve(&t.apply(&x)).unwrap();
        for (a, b) in back.iter().zip(&x) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn singular_is_reported() {
        let t = Tridiagonal::new(vec![1.0], vec![1.0, 1.0], vec![1.0]);
        assert!(matches!(t, Err(FracError::Singular(_))));
    }
}
