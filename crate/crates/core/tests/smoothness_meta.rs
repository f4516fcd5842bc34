use bregman_lab::smoothness::catalog::all;
use bregman_lab::smoothness::*;

// smoothness relative to κ implies the cocoercivity inequality on the same samples
#[test]
fn smooth_instances_are_cocoercive() {
    let mut smooth = 0;
    for inst in all() {
        let r = equivalence_suite(&inst).unwrap();
        assert!(r.agree, "{}", inst.name);
        if r.rel_smooth.consistent() {
            smooth += 1;
            assert!(r.bcoco.consistent(), "{}: {:?}", inst.name, r.bcoco);
        }
        assert_eq!(r.rel_smooth.consistent(), r.rel_smooth.max_violation <= inst.tol, "{}", inst.name);
    }
    assert!(smooth >= 2);
}

#[test]
fn counterexample_witness_is_a_real_violation() {
    let inst = catalog::euclidean_quadratic(2.0);
    let r = rel_smooth_check(&inst.kernel, &inst.f, &inst.samples, inst.tol).unwrap();
    assert!(!r.consistent());
    let (pair, res) = &r.witnesses[0];
    assert!(*res < -inst.tol, "{pair:?}");
}
