//! Chebyshev expansion of smooth factors on `[0, 1]`.

use std::f64::consts::PI;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use super::SpectralFunction;
use crate::jacobi::{gamma_ratio, JacobiParams};

/// Default sample count for truncation `n`.
pub fn default_samples(n: usize) -> usize {
    (2 * n).max(64)
}

/// `P_n^{(−1/2,−1/2)} = c_n T_n` with `c_n = Γ(n + 1/2) / (√π n!)`.
fn chebyshev_normalization(n: usize) -> f64 {
    gamma_ratio(n as f64 + 0.5, n as f64 + 1.0).expect("positive arguments") / PI.sqrt()
}

/// Coefficients of `g` in the shifted first-kind Chebyshev basis `T_n(2x − 1)`,
/// from samples at the `m + 1` Chebyshev-Lobatto points and a DCT-I.
pub fn chebyshev_coefficients<G: Fn(f64) -> f64>(g: G, m: usize) -> Vec<f64> {
    if m == 0 {
        return vec![g(0.5)];
    }
    let samples: Vec<f64> = (0..=m).map(|j| g(0.5 * (1.0 + (PI * j as f64 / m as f64).cos()))).collect();
    // Even extension of length 2m turns the DCT-I into a plain FFT.
    let len = 2 * m;
    let mut buf: Vec<Complex<f64>> = (0..len)
        .map(|j| {
            let idx = if j <= m { j } else { len - j };
            Complex::new(samples[idx], 0.0)
        })
        .collect();
    FftPlanner::new().plan_fft_forward(len).process(&mut buf);
    let mut coeffs: Vec<f64> = buf.iter().take(m + 1).map(|c| c.re / m as f64).collect();
    coeffs[0] *= 0.5;
    coeffs[m] *= 0.5;
    coeffs
}

/// Expansion of `g` in `Q_n^{−1/2,−1/2}` with `m + 1` terms.
pub fn chebyshev_expand<G: Fn(f64) -> f64>(g: G, m: usize) -> SpectralFunction {
    let coeffs = chebyshev_coefficients(g, m)
        .into_iter()
        .enumerate()
        .map(|(n, a)| a / chebyshev_normalization(n))
        .collect();
    SpectralFunction {
        weight: (0.0, 0.0),
        params: JacobiParams {
            gamma: -0.5,
            beta: -0.5,
        },
        coeffs,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_function() {
        let f = chebyshev_expand(|_| 1.0, 16);
        assert!((f.coeffs[0] - 1.0).abs() < 1e-15);
        assert!(f.coeffs[1..].iter().all(|c| c.abs() < 1e-15));
    }

    #[test]
    fn linear_function_is_one_mode() {
        // Q_1^{−1/2,−1/2}(x) = (2x − 1)/2, so 2x − 1 has coefficient 2.
        let basis = crate::jacobi::eval_jacobi(1, JacobiParams::new(-0.5, -0.5).unwrap(), 0.9).unwrap();
        assert!((basis - 0.4).abs() < 1e-15);
        let f = chebyshev_expand(|x| 2.0 * x - 1.0, 16);
        assert!((f.coeffs[1] - 2.0).abs() < 1e-14);
        for (n, c) in f.coeffs.iter().enumerate() {
            if n != 1 {
                assert!(c.abs() < 1e-15, "n={n}: {c}");
            }
        }
    }

    #[test]
    fn sine_reconstruction() {
        let f = chebyshev_expand(f64::sin, 32);
        for i in 0..100 {
            let x = i as f64 / 99.0;
            assert!((f.eval(x) - x.sin()).abs() < 1e-13, "x={x}");
        }
    }

    #[test]
    fn entire_function_at_default_size() {
        let g = |x: f64| (3.0 * x).exp() * (5.0 * x).cos();
        let f = chebyshev_expand(g, default_samples(8));
        let mut worst = 0.0f64;
        for i in 0..=500 {
            let x = i as f64 / 500.0;
            worst = worst.max((f.eval(x) - g(x)).abs());
        }
        assert!(worst <= 1e-12, "{worst:e}");
    }
}
