//! Matrix-vector products with lower-triangular Toeplitz-dot-Hankel matrices
//!
//! `M[i][j] = left[i] · T[i−j] · H[i+j] · right[j]` for `i ≥ j`.
//!
//! The Hankel factor is a moment sequence, so its diagonally scaled matrix is
//! positive semidefinite with rapidly decaying spectrum. A pivoted Cholesky
//! factorization `H ≈ Σ_r ℓ_r ℓ_rᵀ` turns the Hadamard product into a sum of
//! `diag(ℓ_r) T diag(ℓ_r)` terms, each applied with one circulant FFT.

use std::sync::Arc;

use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{FracError, Result};

/// Stop the pivoted Cholesky once every residual diagonal entry is below this.
/// Residual diagonals carry rounding noise of a few `rank · ε`, so the
/// threshold sits above that floor.
pub const DEFAULT_RANK_TOL: f64 = 1e-13;

/// Smallest `2^a 3^b 5^c` not below `min`, a length `rustfft` handles with
/// its fast radix kernels.
fn smooth_len(min: usize) -> usize {
    (min..)
        .find(|&m| {
            let mut r = m;
            for p in [2, 3, 5] {
                while r % p == 0 {
                    r /= p;
                }
            }
            r == 1
        })
        .expect("5-smooth numbers are unbounded")
}

/// Products at least this long spread the factor pairs over threads.
const PARALLEL_MIN_LEN: usize = 512;

/// A residual diagonal below this is genuine indefiniteness, not rounding.
const INDEFINITE: f64 = -1e-8;

/// A Toeplitz-dot-Hankel matrix in low-rank factored form.
#[derive(Clone)]
pub struct ToeplitzHankel {
    n: usize,
    left: Vec<f64>,
    right: Vec<f64>,
    toeplitz: Vec<f64>,
    /// Columns `ℓ_r` with `H[i+j] ≈ Σ_r ℓ_r[i] ℓ_r[j]`.
    factors: Vec<Vec<f64>>,
    fft_len: usize,
    toeplitz_hat: Vec<Complex<f64>>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for ToeplitzHankel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ToeplitzHankel")
            .field("n", &self.n)
            .field("rank", &self.factors.len())
            .finish()
    }
}

/// Pivoted Cholesky of the scaled Hankel matrix `H[i+j] / sqrt(H[2i] H[2j])`.
/// Returns `None` when the matrix is not numerically positive semidefinite.
fn hankel_factors(hankel: &[f64], n: usize, tol: f64) -> Option<Vec<Vec<f64>>> {
    let scale: Vec<f64> = (0..n).map(|i| hankel[2 * i]).collect();
    if scale.iter().any(|&h| !(h > 0.0 && h.is_finite())) {
        return None;
    }
    let scale: Vec<f64> = scale.into_iter().map(f64::sqrt).collect();
    let scaled = |i: usize, j: usize| hankel[i + j] / (scale[i] * scale[j]);

    let mut diag = vec![1.0f64; n];
    let mut cols: Vec<Vec<f64>> = Vec::new();
    while cols.len() < n {
        let (p, &dmax) = diag
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .expect("n > 0");
        if dmax <= tol {
            break;
        }
        let root = dmax.sqrt();
        let mut col = vec![0.0; n];
        for (i, c) in col.iter_mut().enumerate() {
            let mut v = scaled(i, p);
            for prev in &cols {
                v -= prev[i] * prev[p];
            }
            *c = v / root;
        }
        for (d, c) in diag.iter_mut().zip(&col) {
            *d -= c * c;
        }
        // An indefinite residual means the symbol is not a moment sequence.
        if diag.iter().any(|&d| d < INDEFINITE) {
            return None;
        }
        cols.push(col);
    }
    for col in &mut cols {
        for (c, s) in col.iter_mut().zip(&scale) {
            *c *= s;
        }
    }
    Some(cols)
}

impl ToeplitzHankel {
    /// `toeplitz` and `left`, `right` have length `n`; `hankel` has length `2n − 1`.
    /// Returns `Ok(None)` when the Hankel symbol admits no low-rank PSD expansion.
    pub fn new(
        left: Vec<f64>,
        toeplitz: Vec<f64>,
        hankel: &[f64],
        right: Vec<f64>,
        tol: f64,
    ) -> Result<Option<Self>> {
        let n = left.len();
        if toeplitz.len() != n || right.len() != n {
            return Err(FracError::SizeMismatch {
                expected: n,
                got: toeplitz.len().min(right.len()),
            });
        }
        if hankel.len() != (2 * n).saturating_sub(1) {
            return Err(FracError::SizeMismatch {
                expected: 2 * n - 1,
                got: hankel.len(),
            });
        }
        if n == 0 {
            return Err(FracError::InvalidArgument("empty Toeplitz-dot-Hankel matrix".into()));
        }
        let Some(factors) = hankel_factors(hankel, n, tol) else {
            return Ok(None);
        };
        let fft_len = smooth_len(2 * n.max(1) - 1);
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(fft_len);
        let inverse = planner.plan_fft_inverse(fft_len);
        let mut toeplitz_hat = vec![Complex::new(0.0, 0.0); fft_len];
        for (dst, &t) in toeplitz_hat.iter_mut().zip(&toeplitz) {
            dst.re = t;
        }
        forward.process(&mut toeplitz_hat);
        Ok(Some(Self {
            n,
            left,
            right,
            toeplitz,
            factors,
            fft_len,
            toeplitz_hat,
            forward,
            inverse,
        }))
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Number of terms in the Hankel expansion.
    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    /// Entry `(i, j)` of the factored matrix.
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        if j > i {
            return 0.0;
        }
        let h: f64 = self.factors.iter().map(|c| c[i] * c[j]).sum();
        self.left[i] * self.toeplitz[i - j] * h * self.right[j]
    }

    fn check_len(&self, v: &[f64]) -> Result<()> {
        if v.len() != self.n {
            return Err(FracError::SizeMismatch {
                expected: self.n,
                got: v.len(),
            });
        }
        Ok(())
    }

    /// Causal convolution with the Toeplitz symbol of two real sequences at once.
    fn convolve_pair(&self, x1: &[f64], x2: Option<&[f64]>, buf: &mut [Complex<f64>], scratch: &mut [Complex<f64>]) {
        buf.fill(Complex::new(0.0, 0.0));
        for (j, b) in buf.iter_mut().take(self.n).enumerate() {
            b.re = x1[j];
            if let Some(x2) = x2 {
                b.im = x2[j];
            }
        }
        self.forward.process_with_scratch(buf, scratch);
        for (b, t) in buf.iter_mut().zip(&self.toeplitz_hat) {
            *b *= t;
        }
        self.inverse.process_with_scratch(buf, scratch);
        let norm = 1.0 / self.fft_len as f64;
        for b in buf.iter_mut().take(self.n) {
            *b *= norm;
        }
    }

    fn scratch(&self) -> (Vec<Complex<f64>>, Vec<Complex<f64>>) {
        let len = self
            .forward
            .get_inplace_scratch_len()
            .max(self.inverse.get_inplace_scratch_len());
        (
            vec![Complex::new(0.0, 0.0); self.fft_len],
            vec![Complex::new(0.0, 0.0); len],
        )
    }

    /// Contribution of each pair of Hankel factors, summed in factor order.
    /// The partials are computed identically on the serial and parallel
    /// paths, so the result does not depend on the schedule.
    fn sum_over_pairs<F>(&self, partial: F) -> Vec<f64>
    where
        F: Fn(&[Vec<f64>], &mut [Complex<f64>], &mut [Complex<f64>]) -> Vec<f64> + Sync,
    {
        let partials: Vec<Vec<f64>> = if self.n >= PARALLEL_MIN_LEN && rayon::current_num_threads() > 1 {
            self.factors
                .par_chunks(2)
                .map_init(|| self.scratch(), |(buf, scratch), pair| partial(pair, buf, scratch))
                .collect()
        } else {
            let (mut buf, mut scratch) = self.scratch();
            self.factors.chunks(2).map(|pair| partial(pair, &mut buf, &mut scratch)).collect()
        };
        let mut out = vec![0.0; self.n];
        for p in &partials {
            for (o, v) in out.iter_mut().zip(p) {
                *o += v;
            }
        }
        out
    }

    /// `M · v`.
    pub fn matvec(&self, v: &[f64]) -> Result<Vec<f64>> {
        self.check_len(v)?;
        let weighted: Vec<f64> = v.iter().zip(&self.right).map(|(a, b)| a * b).collect();
        let mut out = self.sum_over_pairs(|pair, buf, scratch| {
            let x1: Vec<f64> = pair[0].iter().zip(&weighted).map(|(l, w)| l * w).collect();
            let x2: Option<Vec<f64>> = pair.get(1).map(|c| c.iter().zip(&weighted).map(|(l, w)| l * w).collect());
            self.convolve_pair(&x1, x2.as_deref(), buf, scratch);
            (0..self.n)
                .map(|i| pair[0][i] * buf[i].re + pair.get(1).map_or(0.0, |c| c[i] * buf[i].im))
                .collect()
        });
        for (o, l) in out.iter_mut().zip(&self.left) {
            *o *= l;
        }
        Ok(out)
    }

    /// `Mᵀ · v`, computed as a reversed causal convolution.
    pub fn matvec_transpose(&self, v: &[f64]) -> Result<Vec<f64>> {
        self.check_len(v)?;
        let n = self.n;
        let weighted: Vec<f64> = v.iter().zip(&self.left).map(|(a, b)| a * b).collect();
        let reversed = |c: &[f64]| -> Vec<f64> { (0..n).map(|m| c[n - 1 - m] * weighted[n - 1 - m]).collect() };
        let mut out = self.sum_over_pairs(|pair, buf, scratch| {
            let x1 = reversed(&pair[0]);
            let x2 = pair.get(1).map(|c| reversed(c));
            self.convolve_pair(&x1, x2.as_deref(), buf, scratch);
            (0..n)
                .map(|j| {
                    let b = buf[n - 1 - j];
                    pair[0][j] * b.re + pair.get(1).map_or(0.0, |c| c[j] * b.im)
                })
                .collect()
        });
        for (o, r) in out.iter_mut().zip(&self.right) {
            *o *= r;
        }
        Ok(out)
    }
}
