use bregman_lab::bregman::distance;
use bregman_lab::functions::make_function;
use bregman_lab::kernels::{make_kernel, Kernel};
use bregman_lab::left::HullOpts;
use bregman_lab::numerics::{ObjectiveFn, Side, SolverOpts};
use bregman_lab::right::*;
use proptest::prelude::*;

fn kernel(name: &str) -> Kernel {
    make_kernel(name, &[]).unwrap()
}

fn right(name: &str, k: &Kernel) -> ObjectiveFn {
    make_function(name, &[], k, Side::Right).unwrap()
}

fn o() -> SolverOpts {
    SolverOpts::default()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn right_envelope_is_a_minorant(x in -2.0f64..2.0, lambda in 0.1f64..2.0, ys in prop::collection::vec(-5.0f64..5.0, 8)) {
        let k = kernel("exp");
        let g = right("sq", &k);
        let e = right_env(&k, &g, lambda, &[x], &o()).unwrap().to_f64();
        for y in ys {
            let v = y * y + distance(&k, &[x], &[y]).to_f64() / lambda;
            prop_assert!(e <= v + 1e-12, "env {} above {} at y = {}", e, v, y);
        }
    }

    #[test]
    fn legendre_epi_composition_is_a_composition(xi in 1e-3f64..50.0) {
        let k = kernel("exp");
        let g = right("double_well", &k);
        let e = epi_composition(&k, &g, &[xi]).unwrap();
        prop_assert_eq!(e, g.eval(&k.conj_grad(&[xi]).unwrap()));
        let b = kernel("burg");
        let ln = right("ln", &b);
        let e = epi_composition(&b, &ln, &[-xi]).unwrap();
        prop_assert_eq!(e, ln.eval(&b.conj_grad(&[-xi]).unwrap()));
    }

    #[test]
    fn epi_composition_is_infinite_off_the_range(xi in -10.0f64..-1e-6) {
        let k = kernel("exp");
        prop_assert!(epi_composition(&k, &right("sq", &k), &[xi]).unwrap().is_pos_inf());
    }

    #[test]
    fn right_conjugate_form_matches(x in -2.0f64..2.0) {
        let k = kernel("exp");
        let g = right("sq", &k);
        let a = right_env_conjugate_form(&k, &g, 1.0, &[x], None, &o()).unwrap().to_f64();
        let b = right_env(&k, &g, 1.0, &[x], &o()).unwrap().to_f64();
        prop_assert!((a - b).abs() <= 1e-5 * (1.0 + b.abs()), "{} vs {}", a, b);
    }
}

#[test]
fn right_hull_sandwich_and_triconjugacy() {
    let k = kernel("exp");
    let g = right("double_well", &k);
    let lambda = 0.5;
    let hull = RightHull::new(&k, &g, lambda, HullOpts::default(), &o()).unwrap();
    let h = ObjectiveFn::new("hull*", k.domain.interior(), Side::Right, move |y| {
        hull.eval(y).map(|v| v.to_f64()).unwrap_or(f64::INFINITY)
    });
    for i in 0..9 {
        let t = -2.0 + 0.5 * i as f64;
        let (hv, gv) = (h.eval(&[t]).to_f64(), g.eval(&[t]).to_f64());
        assert!(hv <= gv + 1e-9, "hull* {hv} above g {gv} at {t}");
        let a = right_env(&k, &h, lambda, &[t], &o()).unwrap().to_f64();
        let b = right_env(&k, &g, lambda, &[t], &o()).unwrap().to_f64();
        assert!((a - b).abs() <= 1e-4, "at {t}: env*(hull*) {a} vs env* {b}");
    }
}

#[test]
fn refined_hull_identity() {
    let k = kernel("exp");
    let g = right("double_well", &k);
    let lambda = 0.5;
    let conv = ConvexifiedConjSide::new(&k, &g, lambda, 1e-3, 50.0, 20_000).unwrap();
    let hull = RightHull::new(&k, &g, lambda, HullOpts::default(), &o()).unwrap();
    // the supporting anchors x̄ stay inside the hull grid window of X for these y
    for i in 0..15 {
        let y = -1.5 + 4.5 * i as f64 / 14.0;
        let a = lambda * hull.eval(&[y]).unwrap().to_f64();
        let b = conv.eval(&[y]).unwrap().to_f64();
        assert!((a - b).abs() <= 1e-3 * (1.0 + a.abs()), "at {y}: {a} vs {b}");
    }
}

#[test]
fn piecewise_preimage_branches() {
    // ∇κ(y) = ξ has one solution per branch for ξ ∈ [0, 1) and the minimum over both realizes the epi-composition
    let pw = kernel("piecewise_env_star");
    let inv = right("inv", &pw);
    let epi = EpiComposition::with_method(&pw, &inv, EpiMethod::Preimage).unwrap();
    for xi in [0.1, 0.5, 0.9] {
        let pre = epi.preimage(xi).unwrap();
        let vals: Vec<f64> = pre.iter().map(|&y| inv.eval(&[y]).to_f64()).collect();
        let m = vals.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!((epi.eval(&[xi]).unwrap().to_f64() - m).abs() < 1e-12);
        assert!((m - (1.0 - xi).sqrt()).abs() < 1e-8, "{xi}: {pre:?}");
    }
}
