use bregman_lab::functions::make_function;
use bregman_lab::kernels::make_kernel;
use bregman_lab::left::left_env;
use bregman_lab::numerics::{Side, SolverOpts};
use bregman_lab::phi::*;
use num_rational::BigRational;
use proptest::prelude::*;

fn burg_grid(n: usize, h: f64) -> Vec<Vec<f64>> {
    (1..=n).map(|i| vec![h * i as f64]).collect()
}

#[test]
fn zero_has_zero_grid_conjugate() {
    let k = make_kernel("burg", &[]).unwrap();
    let g = burg_grid(40, 0.1);
    let c = exact_coupling(&bregman_coupling(&k, 0.5, &g, &g).unwrap()).unwrap();
    let zero = vec![Ext::Finite(rational_from_int(0)); g.len()];
    assert_eq!(phi_conjugate(&c, &zero).unwrap(), zero);
    assert_eq!(phi_biconjugate(&c, &zero).unwrap(), zero);
}

#[test]
fn burg_ln_grid_conjugate_tracks_the_envelope() {
    // grid on (0, 4]; the grid envelope is above the continuous one by at most
    // one step times the steeper secant next to the grid minimizer
    let k = make_kernel("burg", &[]).unwrap();
    let f = make_function("ln", &[], &k, Side::Left).unwrap();
    let lambda = 0.5;
    let h = 0.01;
    let g = burg_grid(400, h);
    let c = bregman_coupling(&k, lambda, &g, &g).unwrap();
    let fv: Vec<Ext<f64>> = g.iter().map(|x| Ext::Finite(x[0].ln())).collect();
    let conj = phi_conjugate(&c, &fv).unwrap();
    for j in (10..400).step_by(37) {
        let Ext::Finite(cj) = conj[j] else { panic!() };
        let col: Vec<f64> = (0..400).map(|i| g[i][0].ln() - c.phi(i, j)).collect();
        let i = (0..400).min_by(|&a, &b| col[a].total_cmp(&col[b])).unwrap();
        let slope = [i.checked_sub(1), Some(i + 1).filter(|&t| t < 400)]
            .iter()
            .flatten()
            .map(|&t| (col[t] - col[i]).abs() / h)
            .fold(0.0, f64::max);
        let env = left_env(&k, &f, lambda, &g[j], &SolverOpts::default()).unwrap().to_f64();
        let gap = -cj - env;
        assert!(gap >= -1e-9 && gap <= slope * h + 1e-9, "y = {:?}: gap {gap}, bound {}", g[j], slope * h);
    }
}

fn rational_fn(vals: &[Option<i64>]) -> Vec<Ext<BigRational>> {
    vals.iter().map(|v| v.map_or(Ext::PosInf, |t| Ext::Finite(BigRational::new(t.into(), 4.into())))).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn bregman_grid_triconjugacy(vals in prop::collection::vec(prop::option::weighted(0.8, -40i64..40), 12), lambda in 0.1f64..3.0) {
        let k = make_kernel("exp", &[]).unwrap();
        let g: Vec<Vec<f64>> = (0..12).map(|i| vec![-1.5 + 0.25 * i as f64]).collect();
        let c = exact_coupling(&bregman_coupling(&k, lambda, &g, &g).unwrap()).unwrap();
        let mut vals = vals;
        vals[0] = Some(vals[0].unwrap_or(0));
        let f = rational_fn(&vals);
        let conj = phi_conjugate(&c, &f).unwrap();
        let bi = phi_biconjugate(&c, &f).unwrap();
        prop_assert_eq!(phi_conjugate(&c, &bi).unwrap(), conj);
        prop_assert_eq!(phi_biconjugate(&c, &bi).unwrap(), bi.clone());
        for (b, v) in bi.iter().zip(&f) {
            if let (Ext::Finite(b), Ext::Finite(v)) = (b, v) {
                prop_assert!(b <= v);
            }
        }
        let i = vals.iter().position(|v| v.is_some()).unwrap();
        for j in 0..12 {
            prop_assert!(fy_duality_check(&c, &f, i, j).unwrap().consistent());
        }
    }
}
