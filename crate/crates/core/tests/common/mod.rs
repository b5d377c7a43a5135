//! Shared oracles for the integration tests.

#![allow(dead_code)]

use fracctrl::jacobi::{gauss_jacobi_rule, JacobiParams};

/// `∫₀¹ f` for integrands with algebraic endpoint singularities.
///
/// Each half of the interval is mapped by `x = t^8`, which makes endpoint
/// singularities bounded, then integrated by composite 24-point Gauss-Legendre
/// on a geometrically graded mesh. The integrand receives `x` and `1 − x` so
/// both endpoints keep full relative precision.
pub fn graded<F: Fn(f64, f64) -> f64>(f: F) -> f64 {
    const POWER: i32 = 8;
    let gl = gauss_jacobi_rule(24, JacobiParams::new(0.0, 0.0).unwrap()).unwrap();
    let end = 0.5f64.powf(1.0 / POWER as f64);
    let mut pts = vec![0.0];
    for k in (1..=40).rev() {
        pts.push(end * 0.6f64.powi(k));
    }
    pts.push(end);
    let half = |g: &dyn Fn(f64, f64) -> f64| -> f64 {
        pts.windows(2)
            .map(|w| {
                let (a, b) = (w[0], w[1]);
                gl.nodes
                    .iter()
                    .zip(&gl.weights)
                    .map(|(x, wt)| {
                        let t = a + (b - a) * x;
                        let near = t.powi(POWER);
                        (b - a) * wt * g(near, 1.0 - near) * POWER as f64 * t.powi(POWER - 1)
                    })
                    .sum::<f64>()
            })
            .sum()
    };
    half(&|x, y| f(x, y)) + half(&|y, x| f(x, y))
}
