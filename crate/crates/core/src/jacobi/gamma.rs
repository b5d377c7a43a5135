//! Log-domain gamma function helpers.
//!
//! Every ratio of gamma functions in the crate goes through [`gamma_ratio`],
//! which shifts both arguments into the asymptotic regime with an explicit
//! product and then evaluates the Stirling series as a *difference*, so the
//! large `ln Γ` terms cancel analytically instead of numerically. This keeps
//! ratios such as `Γ(n + 1 + α) / Γ(n + 1)` accurate to a few ulps at
//! `n = 2^14` and beyond, where a naive `exp(lnΓ(x) - lnΓ(y))` loses about
//! five digits.

use crate::error::{FracError, Result};

/// Below this argument the Stirling series is not used directly.
const ASYMPTOTIC_START: f64 = 20.0;

/// `B_{2k} / (2k (2k - 1))` for k = 1..8.
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];

fn is_pole(x: f64) -> bool {
    x <= 0.0 && x == x.round()
}

/// Tail of the Stirling series `Σ c_k z^{1-2k}`.
fn stirling_tail(z: f64) -> f64 {
    let zinv2 = 1.0 / (z * z);
    let mut pow = 1.0 / z;
    let mut acc = 0.0;
    for c in STIRLING {
        acc += c * pow;
        pow *= zinv2;
    }
    acc
}

/// Number of unit shifts needed to bring `x` into the asymptotic regime.
fn shift_count(x: f64) -> usize {
    if x >= ASYMPTOTIC_START {
        0
    } else {
        (ASYMPTOTIC_START - x).ceil() as usize
    }
}

/// `ln Γ(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(FracError::InvalidArgument(format!(
            "ln_gamma requires a positive argument, got {x}"
        )));
    }
    let k = shift_count(x);
    let mut prod = 1.0;
    let mut log_acc = 0.0;
    for j in 0..k {
        prod *= x + j as f64;
        if prod > 1e250 {
            log_acc += prod.ln();
            prod = 1.0;
        }
    }
    log_acc += prod.ln();
    let z = x + k as f64;
    let lg = (z - 0.5) * z.ln() - z + 0.5 * (2.0 * std::f64::consts::PI).ln() + stirling_tail(z);
    Ok(lg - log_acc)
}

/// `Γ(x) / Γ(y)` for positive arguments, evaluated in difference form.
fn gamma_ratio_positive(x: f64, y: f64) -> f64 {
    let k = shift_count(x.min(y));
    // Γ(x)/Γ(y) = Γ(x+k)/Γ(y+k) · Π (y+j)/(x+j)
    let mut prod = 1.0;
    for j in 0..k {
        prod *= (y + j as f64) / (x + j as f64);
    }
    let big_x = x + k as f64;
    let big_y = y + k as f64;
    let d = big_x - big_y;
    let rest = (big_x - 0.5) * (d / big_y).ln_1p() - d + stirling_tail(big_x) - stirling_tail(big_y);
    if d.abs() <= 8.0 {
        // Y^d is rounded once; exp(d ln Y) would inherit the rounding of a large exponent.
        prod * big_y.powf(d) * rest.exp()
    } else {
        prod * (rest + d * big_y.ln()).exp()
    }
}

/// `Γ(x) / Γ(y)`.
///
/// Valid for any real arguments away from the poles of `Γ`; negative
/// non-integer arguments are shifted up with an explicit product.
pub fn gamma_ratio(x: f64, y: f64) -> Result<f64> {
    if is_pole(x) {
        return Err(FracError::GammaPole(x));
    }
    if is_pole(y) {
        // 1/Γ(y) vanishes at the poles.
        return Ok(0.0);
    }
    if x > 0.0 && y > 0.0 {
        return Ok(gamma_ratio_positive(x, y));
    }
    // Shift both into the positive half-line: Γ(x) = Γ(x+k) / Π_{j<k}(x+j).
    let k = (1.0 - x.min(y)).ceil().max(0.0) as usize;
    let mut factor = 1.0;
    for j in 0..k {
        factor *= (y + j as f64) / (x + j as f64);
    }
    Ok(factor * gamma_ratio_positive(x + k as f64, y + k as f64))
}

/// `Γ(x)` for moderate arguments. Refuses arguments above 170, where the
/// value overflows; use [`gamma_ratio`] there.
pub fn gamma(x: f64) -> Result<f64> {
    if x > 170.0 {
        return Err(FracError::InvalidArgument(format!(
            "direct gamma evaluation overflows at {x}; use a ratio"
        )));
    }
    gamma_ratio(x, 1.0)
}

/// Euler beta function `B(a, b) = Γ(a) Γ(b) / Γ(a + b)` for `a, b > 0`.
pub fn beta(a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0) {
        return Err(FracError::InvalidArgument(format!(
            "beta requires positive arguments, got ({a}, {b})"
        )));
    }
    let (small, large) = if a <= b { (a, b) } else { (b, a) };
    Ok(gamma_ratio(large, a + b)? * gamma(small)?)
}

/// `Γ(n + 1 + α) / Γ(n + 1)`, the growth factor of the fractional eigenvalues.
pub fn log_gamma_ratio(n: usize, alpha: f64) -> Result<f64> {
    let x = n as f64 + 1.0 + alpha;
    if is_pole(x) {
        return Err(FracError::GammaPole(x));
    }
    gamma_ratio(x, n as f64 + 1.0)
}

/// Rising factorial `(a)_j` divided by `j!`, for `j = 0..len`.
pub fn pochhammer_over_factorial(a: f64, len: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(len);
    let mut t = 1.0;
    for j in 0..len {
        if j > 0 {
            t *= (a + (j - 1) as f64) / j as f64;
        }
        out.push(t);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        assert!((gamma(1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((gamma(5.0).unwrap() - 24.0).abs() < 24.0 * 1e-15);
        let g25 = 0.75 * std::f64::consts::PI.sqrt();
        assert!((gamma(2.5).unwrap() / g25 - 1.0).abs() < 1e-14);
        let g_half = std::f64::consts::PI.sqrt();
        assert!((gamma(0.5).unwrap() / g_half - 1.0).abs() < 1e-14);
    }

    #[test]
    fn negative_arguments() {
        // Γ(-0.5) = -2 √π
        let expected = -2.0 * std::f64::consts::PI.sqrt();
        assert!((gamma(-0.5).unwrap() / expected - 1.0).abs() < 1e-14);
        assert!(matches!(gamma(-2.0), Err(FracError::GammaPole(_))));
        assert_eq!(gamma_ratio(1.5, -3.0).unwrap(), 0.0);
    }

    #[test]
    fn ln_gamma_against_factorial() {
        let mut lf = 0.0;
        for n in 1..60usize {
            // ln Γ(n+1) = ln n!
            lf += (n as f64).ln();
            let v = ln_gamma(n as f64 + 1.0).unwrap();
            assert!((v - lf).abs() <= 1e-13 * lf.max(1.0), "n={n}");
        }
    }

    #[test]
    fn large_ratio_matches_product() {
        // Γ(n + 3)/Γ(n + 1) = (n+1)(n+2)
        for n in [10usize, 1000, 16384, 100_000] {
            let r = log_gamma_ratio(n, 2.0).unwrap();
            let exact = (n as f64 + 1.0) * (n as f64 + 2.0);
            assert!((r / exact - 1.0).abs() < 2e-15, "n={n}");
        }
    }

    #[test]
    fn beta_identity() {
        // B(1, b) = 1/b
        for b in [0.3, 1.0, 2.7] {
            assert!((beta(1.0, b).unwrap() * b - 1.0).abs() < 1e-14);
        }
        // B(1/2, 1/2) = π
        assert!((beta(0.5, 0.5).unwrap() / std::f64::consts::PI - 1.0).abs() < 1e-14);
    }

    #[test]
    fn pochhammer_sequence() {
        let p = pochhammer_over_factorial(0.5, 4);
        // 1, 1/2, 3/8, 5/16
        assert_eq!(p, vec![1.0, 0.5, 0.375, 0.3125]);
        let q = pochhammer_over_factorial(-1.0, 4);
        assert_eq!(q, vec![1.0, -1.0, 0.0, 0.0]);
    }
}
