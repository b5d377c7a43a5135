//! End-to-end convergence studies at small truncations.

use fracctrl::analysis::{convergence_study, ConvergenceReport, EntryStatus, ReferenceCache};
use fracctrl::operators::Mode;
use fracctrl::problem::{DataFactor, DesiredState, ProblemSpec};
use fracctrl::solver::SolverConfig;

const NS: [usize; 3] = [16, 32, 64];
const N_REF: usize = 256;

fn run(spec: &ProblemSpec, cache: Option<&ReferenceCache>) -> ConvergenceReport {
    convergence_study(spec, &NS, N_REF, &SolverConfig::with_n(16, Mode::Fast), cache).unwrap()
}

#[test]
fn errors_decrease_and_control_is_more_accurate_in_plain_norm() {
    for spec in [ProblemSpec::smooth_example(1.6), ProblemSpec::singular_example(1.8, -0.4)] {
        let report = run(&spec, None);
        assert!(report.failures.is_empty());
        for w in report.rows.windows(2) {
            assert!(w[1].errors.u_weighted < w[0].errors.u_weighted);
            assert!(w[1].errors.z_weighted < w[0].errors.z_weighted);
            assert!(w[1].errors.q_l2 < w[0].errors.q_l2);
        }
        for row in &report.rows {
            let weighted = row.errors.q_weighted.expect("finite weighted control norm");
            assert!(row.errors.q_l2 <= 1.5 * weighted, "{row:?}");
            assert!(row.optimality.residual < 1e-9);
            assert!(row.optimality.control_integral >= -1e-13);
        }
    }
}

#[test]
fn repeated_studies_are_bitwise_identical() {
    let spec = ProblemSpec::smooth_example(1.4);
    let a = run(&spec, None);
    let b = run(&spec, None);
    assert_eq!(a.rows.len(), b.rows.len());
    for (x, y) in a.rows.iter().zip(&b.rows) {
        assert_eq!(x.errors, y.errors);
        assert_eq!(x.orders, y.orders);
    }
}

#[test]
fn cached_reference_reproduces_the_uncached_study() {
    let dir = tempfile::tempdir().unwrap();
    let cache = ReferenceCache::new(dir.path());
    let spec = ProblemSpec::singular_example(1.6, -0.2);
    let plain = run(&spec, None);
    let first = run(&spec, Some(&cache));
    let second = run(&spec, Some(&cache));
    assert!(!first.reference_from_cache);
    assert!(second.reference_from_cache);
    for r in [&first, &second] {
        for (x, y) in plain.rows.iter().zip(&r.rows) {
            assert_eq!(x.errors, y.errors);
        }
    }
    let entries = cache.list().unwrap();
    assert_eq!(entries.len(), 1);
    assert_eq!(entries[0].status, EntryStatus::Valid);
}

#[test]
fn theta_one_reports_absent_weighted_control_error() {
    // With a zero target the adjoint has positive mean, so the control has a
    // nonzero constant part, which σ = 1 makes non-integrable in the negative weight.
    let spec = ProblemSpec {
        theta: 1.0,
        desired: DesiredState::Data(DataFactor::Zero),
        ..ProblemSpec::smooth_example(1.6)
    };
    let report = run(&spec, None);
    assert!(report.failures.is_empty());
    for row in &report.rows {
        assert_eq!(row.errors.q_weighted, None);
        assert!(row.errors.u_weighted.is_finite());
        assert!(row.errors.q_l2.is_finite());
    }
    assert!(report.rows.iter().skip(1).all(|r| r.orders.q_weighted.is_none() && r.orders.q_l2.is_some()));
}
