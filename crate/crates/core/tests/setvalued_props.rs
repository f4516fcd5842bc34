use bregman_lab::functions::make_function;
use bregman_lab::kernels::make_kernel;
use bregman_lab::left::left_prox_operator;
use bregman_lab::numerics::{Domain, Interval, Side, SolverOpts};
use bregman_lab::setvalued::catalog::*;
use bregman_lab::setvalued::*;
use proptest::prelude::*;

fn catalog() -> Vec<SampledOperator> {
    vec![osc_target_t1(), osc_target_t2(), identity_closed(), empty_near_origin(), reciprocal_t2(vec![0.0, 2.0])]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn implication_arrows_hold_at_random_points(ts in prop::collection::vec(0.0f64..1.0, 3)) {
        for op in catalog() {
            let probes: Vec<Vec<f64>> = ts.iter().map(|&t| vec![if op.source.contains(&[t]) { t } else { 0.5 }]).collect();
            let r = implication_matrix(&op, &probes).unwrap();
            prop_assert!(r.violations.is_empty(), "{}: {:?}", op.label, r.violations);
            prop_assert!(!r.caveat.is_empty());
        }
    }

    #[test]
    fn values_stay_in_the_target(t in 0.0f64..1.0) {
        for op in catalog() {
            for p in op.value_at(&[t]) {
                prop_assert!(op.target.contains(&p));
            }
        }
    }
}

#[test]
fn usc_with_compact_values_gives_osc_and_local_boundedness() {
    let op = identity_closed();
    for t in [0.0, 0.3, 1.0] {
        assert!(check_usc(&op, &[t], &USC_EPS).unwrap().holds);
        assert!(check_osc(&op, &[t], OSC_TOL).unwrap().holds);
        assert!(check_local_bounded(&op, &[t], &LB_RADII).unwrap().holds);
    }
}

#[test]
fn prox_of_zero_depends_on_the_spaces() {
    let k = make_kernel("burg", &[]).unwrap();
    let z = make_function("zero", &[], &k, Side::Left).unwrap();
    let o = SolverOpts::default();
    let y = Domain::interval(Interval::open(0.0, f64::INFINITY));
    let op = left_prox_operator(&k, &z, 1.0, y.clone(), y, &o);
    for t in [0.01, 1.0, 3.0] {
        assert!(check_osc(&op, &[t], OSC_TOL).unwrap().holds);
        assert!(check_usc(&op, &[t], &USC_EPS).unwrap().holds);
        assert_eq!(op.value_at(&[t]).len(), 1);
    }
    let op = left_prox_operator(&k, &z, 1.0, Domain::real_space(1), Domain::real_space(1), &o);
    let v = check_osc(&op, &[0.0], OSC_TOL).unwrap();
    assert!(!v.holds && v.witness.is_some());
    assert!(!check_usc(&op, &[0.0], &USC_EPS).unwrap().holds);
    assert!(op.value_at(&[0.0]).is_empty());
}
