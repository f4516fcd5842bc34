use bregman_lab::bregman::distance;
use bregman_lab::functions::make_function;
use bregman_lab::kernels::{make_kernel, Kernel};
use bregman_lab::left::*;
use bregman_lab::numerics::{ObjectiveFn, Side, SolverOpts};
use proptest::prelude::*;

fn kernel(name: &str) -> Kernel {
    make_kernel(name, &[]).unwrap()
}

fn left(name: &str, params: &[f64], k: &Kernel) -> ObjectiveFn {
    make_function(name, params, k, Side::Left).unwrap()
}

fn o() -> SolverOpts {
    SolverOpts::default()
}

/// The cached hull as a function on `X`, for feeding it back into an envelope.
fn hull_fn(k: &Kernel, f: &ObjectiveFn, lambda: f64) -> ObjectiveFn {
    let h = LeftHull::new(k, f, lambda, HullOpts::default(), &o()).unwrap();
    ObjectiveFn::new("hull", k.domain.clone(), Side::Left, move |x| h.eval(x).map(|v| v.to_f64()).unwrap_or(f64::INFINITY))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn envelope_is_a_minorant(lambda in 0.05f64..0.95, y in 0.1f64..5.0, xs in prop::collection::vec(1e-3f64..10.0, 8)) {
        let k = kernel("burg");
        let f = left("ln", &[], &k);
        let e = left_env(&k, &f, lambda, &[y], &o()).unwrap().to_f64();
        prop_assert!(e <= y.ln() + 1e-12);
        for x in xs {
            let v = x.ln() + distance(&k, &[x], &[y]).to_f64() / lambda;
            prop_assert!(e <= v + 1e-12, "env {} above objective {} at x = {}", e, v, x);
        }
    }

    #[test]
    fn envelope_decreases_in_lambda(l1 in 0.05f64..2.0, dl in 0.0f64..2.0, y in -2.0f64..2.0) {
        let k = kernel("euclidean");
        let f = left("double_well", &[], &k);
        let e1 = left_env(&k, &f, l1, &[y], &o()).unwrap().to_f64();
        let e2 = left_env(&k, &f, l1 + dl, &[y], &o()).unwrap().to_f64();
        prop_assert!(e2 <= e1 + 1e-10, "{} > {}", e2, e1);
    }

    #[test]
    fn conjugate_form_matches_the_envelope(y in -0.5f64..3.0, lambda in 0.1f64..0.6) {
        let k = kernel("exp");
        let f = left("id", &[], &k);
        let a = env_conjugate_form(&k, &f, lambda, &[y], None, &o()).unwrap().to_f64();
        let b = lambda * left_env(&k, &f, lambda, &[y], &o()).unwrap().to_f64();
        prop_assert!((a - b).abs() <= 1e-5 * (1.0 + b.abs()), "{} vs {}", a, b);
    }

    #[test]
    fn euclidean_form_of_the_change_of_kernel(y in 0.05f64..8.0) {
        let k = kernel("burg");
        let j = kernel("euclidean");
        let r = change_dgf_left_check(&k, &j, &left("ln", &[], &k), 0.5, &[y], 1e-6, &o()).unwrap();
        prop_assert!(r.holds(), "{:?}", r);
    }
}

#[test]
fn hull_sandwich_and_triconjugacy() {
    let cases: [(&str, &str, &[f64], f64, [f64; 2]); 3] = [
        ("boxed_quadratic", "indicator", &[0.3], 0.5, [-0.9, 0.9]),
        ("euclidean", "double_well", &[], 0.25, [-2.0, 2.0]),
        ("burg", "ln", &[], 0.5, [0.2, 5.0]),
    ];
    for (kn, fname, params, lambda, [lo, hi]) in cases {
        let k = kernel(kn);
        let f = left(fname, params, &k);
        let h = hull_fn(&k, &f, lambda);
        for i in 0..9 {
            let t = lo + (hi - lo) * i as f64 / 8.0;
            let (hv, fv) = (h.eval(&[t]), f.eval(&[t]));
            assert!(hv.to_f64() <= fv.to_f64() + 1e-9 || fv.is_pos_inf(), "{kn}/{fname}: hull {hv} above f {fv} at {t}");
            let a = left_env(&k, &h, lambda, &[t], &o()).unwrap().to_f64();
            let b = left_env(&k, &f, lambda, &[t], &o()).unwrap().to_f64();
            assert!((a - b).abs() <= 1e-4, "{kn}/{fname} at {t}: env(hull) {a} vs env {b}");
        }
    }
}

#[test]
fn threshold_bracket_invariants() {
    let k = kernel("euclidean");
    let f = left("neg_sq", &[], &k);
    let t = prox_bound_threshold(&k, &f, &[0.3], 10.0, &o()).unwrap();
    assert!(t.threshold_low <= 0.5 && 0.5 <= t.threshold_high, "{t:?}");
    assert!(left_env(&k, &f, t.threshold_low, &[0.3], &o()).unwrap().is_finite());
    assert!(left_env(&k, &f, t.threshold_high, &[0.3], &o()).unwrap().is_neg_inf());
    assert!(!t.certificate.is_empty());
    let z = left("zero", &[], &k);
    let t = prox_bound_threshold(&k, &z, &[0.3], 10.0, &o()).unwrap();
    assert_eq!((t.threshold_low, t.threshold_high), (10.0, 10.0));
}

#[test]
fn canonical_extension_stays_lsc() {
    // λf̃ + κ for f = ln on burg: (λ − 1)·ln x → +∞ as x ↓ 0 when λ < 1
    let k = kernel("burg");
    let f = left("ln", &[], &k);
    for lambda in [0.1, 0.5, 0.9] {
        let h = scaled_plus_kernel(&k, &f, lambda).unwrap();
        let vals: Vec<f64> = (1..=12).map(|p| h.eval(&[10f64.powi(-p)]).to_f64()).collect();
        assert!(vals.windows(2).all(|w| w[1] > w[0]), "{lambda}: {vals:?}");
        assert!(h.eval(&[0.0]).is_pos_inf());
    }
}

#[test]
fn main_property_probe_on_the_catalog() {
    let grid: Vec<Vec<f64>> = [0.5, 1.0, 2.0].iter().map(|&t| vec![t]).collect();
    let k = kernel("burg");
    let r = mainprop_probe(&k, &left("ln", &[], &k), 0.5, &grid, &o()).unwrap();
    assert!(r.all_pass(), "{r:?}");
    let r = mainprop_probe(&k, &left("zero", &[], &k), 0.5, &grid, &o()).unwrap();
    assert!(r.all_pass(), "{r:?}");
    let e = kernel("exp");
    let grid: Vec<Vec<f64>> = [-1.0, 0.5, 1.0].iter().map(|&t| vec![t]).collect();
    let r = mainprop_probe(&e, &left("id", &[], &e), 1.0, &grid, &o()).unwrap();
    assert!(!r.get("prox_nonempty").unwrap().pass);
}
