//! Manufactured solutions of the full state and adjoint equations, with
//! advection and reaction switched on, checked against pointwise data
//! projected by an independent quadrature.

mod common;

use common::graded;
use fracctrl::frac::{lambda_coeff, solve_sigma};
use fracctrl::jacobi::{eval_jacobi, JacobiParams};
use fracctrl::operators::{Mode, OperatorSet, Side};
use fracctrl::solver::DirectSolver;

const PAIRS: [(f64, f64); 4] = [(0.7, 1.4), (0.5, 1.8), (0.7, 1.2), (1.0, 1.6)];
const LAMBDA1: f64 = 1.0;
const LAMBDA2: f64 = 1.0;

/// `(1 − x)^a x^b Q_k^{a,b}(x)` and its derivative by the product rule.
fn mode_and_derivative(k: usize, a: f64, b: f64, x: f64, y: f64) -> (f64, f64) {
    let p = JacobiParams::new(a, b).unwrap();
    let q = eval_jacobi(k, p, x).unwrap();
    let dq = if k == 0 {
        0.0
    } else {
        (k as f64 + a + b + 1.0) * eval_jacobi(k - 1, JacobiParams::new(a + 1.0, b + 1.0).unwrap(), x).unwrap()
    };
    let w = y.powf(a) * x.powf(b);
    let dw = -a * y.powf(a - 1.0) * x.powf(b) + b * y.powf(a) * x.powf(b - 1.0);
    (w * q, dw * q + w * dq)
}

fn check_side(side: Side, theta: f64, alpha: f64, k: usize, n: usize) -> f64 {
    let pair = solve_sigma(theta, alpha).unwrap();
    // Trial weight and test weight of the requested side.
    let (trial, test, advection_sign) = match side {
        Side::State => ((pair.sigma, pair.sigma_star), (pair.sigma_star, pair.sigma), 1.0),
        Side::Adjoint => ((pair.sigma_star, pair.sigma), (pair.sigma, pair.sigma_star), -1.0),
    };
    let lambda = lambda_coeff(k, pair);
    let test_params = JacobiParams::new(test.0, test.1).unwrap();
    // The fractional operator maps the trial mode to λ Q_k in the test family.
    let data = |x: f64, y: f64| {
        let (u, du) = mode_and_derivative(k, trial.0, trial.1, x, y);
        lambda * eval_jacobi(k, test_params, x).unwrap() + advection_sign * LAMBDA1 * du + LAMBDA2 * u
    };
    let rhs: Vec<f64> = (0..=n)
        .map(|m| {
            graded(|x, y| data(x, y) * y.powf(test.0) * x.powf(test.1) * eval_jacobi(m, test_params, x).unwrap())
        })
        .collect();
    let ops = OperatorSet::assemble(n, pair, LAMBDA1, LAMBDA2, Mode::Direct).unwrap();
    let solution = DirectSolver::new(&ops).unwrap().solve(side, &rhs).unwrap();
    solution
        .iter()
        .enumerate()
        .map(|(i, v)| (v - if i == k { 1.0 } else { 0.0 }).abs())
        .fold(0.0, f64::max)
}

#[test]
fn state_mode_is_recovered_with_advection_and_reaction() {
    for (theta, alpha) in PAIRS {
        for k in [0, 2, 5] {
            let err = check_side(Side::State, theta, alpha, k, 10);
            assert!(err < 1e-10, "θ={theta} α={alpha} k={k}: {err:e}");
        }
    }
}

#[test]
fn adjoint_mode_is_recovered_with_advection_and_reaction() {
    for (theta, alpha) in PAIRS {
        for k in [0, 2, 5] {
            let err = check_side(Side::Adjoint, theta, alpha, k, 10);
            assert!(err < 1e-10, "θ={theta} α={alpha} k={k}: {err:e}");
        }
    }
}
