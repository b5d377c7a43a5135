use super::*;
use crate::jacobi::{gauss_jacobi_rule, JacobiParams};
use crate::problem::{DataFactor, DesiredState};

fn small(n: usize, mode: Mode) -> SolverConfig {
    SolverConfig::with_n(n, mode)
}

#[test]
fn config_validation() {
    assert!(SolverConfig::default().validate().is_ok());
    let bad = SolverConfig {
        bootstrap_n: 100,
        ..SolverConfig::with_n(16, Mode::Fast)
    };
    assert!(bad.validate().is_err());
    let bad = SolverConfig {
        outer_tol: 0.0,
        ..SolverConfig::default()
    };
    assert!(bad.validate().is_err());
}

#[test]
fn bootstrap_size_run_is_its_own_bootstrap() {
    let spec = ProblemSpec::smooth_example(1.8);
    let out = optimize(&spec, &small(8, Mode::Direct)).unwrap();
    assert_eq!(out.stats.bootstrap_iterations, 0);
    assert!(out.stats.outer_iterations > 1);
    assert!(*out.stats.outer_history.last().unwrap() <= 1e-12);
    let fast = optimize(&spec, &small(8, Mode::Fast)).unwrap();
    assert_eq!(fast.state, out.state);
}

#[test]
fn zero_data_gives_zero_triple() {
    let spec = ProblemSpec {
        source: DataFactor::Zero,
        desired: DesiredState::Data(DataFactor::Zero),
        ..ProblemSpec::smooth_example(1.4)
    };
    for mode in [Mode::Direct, Mode::Fast] {
        let out = optimize(&spec, &small(16, mode)).unwrap();
        assert!(out.state.iter().chain(&out.adjoint).all(|v| *v == 0.0));
        assert_eq!(out.control.constant, 0.0);
    }
}

#[test]
fn fast_and_direct_modes_agree() {
    for alpha in [1.2, 1.8] {
        let spec = ProblemSpec::smooth_example(alpha);
        let d = optimize(&spec, &small(48, Mode::Direct)).unwrap();
        let f = optimize(&spec, &small(48, Mode::Fast)).unwrap();
        assert!(relative_change(&d.state, &f.state) < 1e-10);
        assert!(relative_change(&d.adjoint, &f.adjoint) < 1e-10);
        assert!(relative_change(&d.control.coefficient_vector(), &f.control.coefficient_vector()) < 1e-10);
    }
}

#[test]
fn converged_triple_satisfies_discrete_system() {
    let spec = ProblemSpec::singular_example(1.6, -0.4);
    let pair = spec.validate().unwrap();
    let n = 40;
    let ops = OperatorSet::assemble_dense(n, pair, spec.lambda1, spec.lambda2).unwrap();
    let rhs = RhsAssembler::new(&spec, pair, n, Mode::Direct).unwrap();
    let out = optimize_with(&spec, &small(n, Mode::Direct), pair, &ops, &rhs).unwrap();
    let f = rhs.state_rhs(&out.control).unwrap();
    let au = ops.apply(Side::State, &out.state).unwrap();
    assert!(relative_change(&f, &au) < 1e-12);
    let g = rhs.adjoint_rhs(&out.state).unwrap();
    let bz = ops.apply(Side::Adjoint, &out.adjoint).unwrap();
    assert!(relative_change(&g, &bz) < 1e-12);
    // The control is the projection of the final adjoint.
    let q = project_control(&out.adjoint, pair, spec.gamma).unwrap();
    assert!(relative_change(&q.coefficient_vector(), &out.control.coefficient_vector()) < 1e-11);
}

#[test]
fn control_is_admissible_and_satisfies_projection() {
    let spec = ProblemSpec::smooth_example(1.4);
    let out = optimize(&spec, &small(32, Mode::Fast)).unwrap();
    assert!(out.control.integral() >= -1e-13);
    let frame = JacobiParams::new(out.pair.sigma_star, out.pair.sigma).unwrap();
    let z_mean = gauss_jacobi_rule(40, frame).unwrap().integrate(|x| out.control.z_part.eval_poly(x));
    let rule = gauss_jacobi_rule(50, JacobiParams::new(0.0, 0.0).unwrap()).unwrap();
    for &x in &rule.nodes {
        let z = out.control.z_part.eval(x);
        let r = spec.gamma * out.control.eval(x) + z - z_mean.max(0.0);
        assert!(r.abs() < 1e-12, "{r}");
    }
}

#[test]
fn outer_iterations_are_mesh_independent() {
    let spec = ProblemSpec::smooth_example(1.8);
    for scheme in [OuterScheme::Coupled, OuterScheme::Nested] {
        let counts: Vec<usize> = [32, 64, 128]
            .iter()
            .map(|&n| {
                let config = SolverConfig {
                    scheme,
                    ..small(n, Mode::Fast)
                };
                optimize(&spec, &config).unwrap().stats.outer_iterations
            })
            .collect();
        let (lo, hi) = (counts.iter().min().unwrap(), counts.iter().max().unwrap());
        assert!(hi - lo <= 2, "{scheme:?} {counts:?}");
    }
}

#[test]
fn schemes_reach_the_same_triple() {
    let spec = ProblemSpec::smooth_example(1.4);
    let a = optimize(&spec, &small(64, Mode::Fast)).unwrap();
    let nested = SolverConfig {
        scheme: OuterScheme::Nested,
        ..small(64, Mode::Fast)
    };
    let b = optimize(&spec, &nested).unwrap();
    assert!(relative_change(&a.state, &b.state) < 1e-10);
    assert!(relative_change(&a.control.coefficient_vector(), &b.control.coefficient_vector()) < 1e-10);
    assert!(a.stats.inner_iterations.iter().all(|&(u, z)| u == 1 && z == 1));
}

#[test]
fn outer_limit_is_reported() {
    let spec = ProblemSpec::smooth_example(1.2);
    let config = SolverConfig {
        outer_max: 2,
        bootstrap_n: 4,
        ..small(16, Mode::Direct)
    };
    let err = optimize(&spec, &config).unwrap_err();
    assert!(matches!(err, FracError::OuterNotConverged { max_iterations: 2, .. }));
}
