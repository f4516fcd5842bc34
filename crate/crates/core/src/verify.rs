//! Deterministic verification suites behind `bregman-lab verify`.
//!
//! Every line carries the number of the acceptance item it belongs to, a
//! pass flag and the worst residual seen, so reports diff cleanly between runs.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bregman::{conj_distance, distance, dual_identity_check, gap_form};
use crate::error::{Error, Result};
use crate::functions::make_function;
use crate::kernels::{make_kernel, Kernel};
use crate::left::{
    change_dgf_left_check, env_conjugate_form, left_env, left_prox, left_prox_operator, prox_bound_threshold,
    HullOpts, LeftHull,
};
use crate::numerics::{Domain, ExtReal, Interval, ObjectiveFn, Point, ProxStatus, Side, SolverOpts};
use crate::phi::{
    bregman_coupling, exact_coupling, fy_duality_check, phi_biconjugate, phi_conjugate, Coupling, Ext,
};
use crate::right::{
    change_dgf_right_check, conj_probe_grid, epi_comp_lsc_check, right_env, right_env_conjugate_form, right_prox,
    EpiComposition, EpiMethod,
};
use crate::setvalued::{
    catalog as ops, check_local_bounded, check_osc, check_usc, implication_matrix, SampledOperator, LB_RADII,
    OSC_TOL, USC_EPS,
};
use crate::smoothness::{catalog as smooth, equivalence_suite, strict_convexity_probe, TOL_EXACT};

pub const SUITES: [&str; 6] = ["identities", "counterexamples", "phi", "setvalued", "smoothness", "all"];

#[derive(Clone, Debug, PartialEq)]
pub struct Line {
    pub criterion: u8,
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl fmt::Display for Line {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {} {}: {}", self.criterion, if self.pass { "PASS" } else { "FAIL" }, self.name, self.detail)
    }
}

#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub lines: Vec<Line>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.lines.iter().all(|l| l.pass)
    }

    pub fn criterion_passed(&self, c: u8) -> Option<bool> {
        let mut it = self.lines.iter().filter(|l| l.criterion == c).peekable();
        it.peek()?;
        Some(it.all(|l| l.pass))
    }

    pub fn render(&self) -> String {
        let mut s = format!("suite {} seed {}\n", self.suite, self.seed);
        for l in &self.lines {
            s.push_str(&l.to_string());
            s.push('\n');
        }
        let ok = self.lines.iter().filter(|l| l.pass).count();
        s.push_str(&format!("{ok}/{} checks passed\n", self.lines.len()));
        s
    }
}

pub fn run_suite(name: &str, seed: u64) -> Result<SuiteReport> {
    let mut out = Lines::default();
    match name {
        "identities" => {
            identities(&mut out, seed)?;
            coupling_consistency(&mut out)?;
        }
        "counterexamples" => counterexamples(&mut out)?,
        "phi" => phi_exact(&mut out, seed)?,
        "setvalued" => set_valued(&mut out)?,
        "smoothness" => smoothness(&mut out)?,
        "all" => {
            counterexamples(&mut out)?;
            identities(&mut out, seed)?;
            phi_exact(&mut out, seed)?;
            coupling_consistency(&mut out)?;
            set_valued(&mut out)?;
            smoothness(&mut out)?;
        }
        other => {
            return Err(Error::InvalidArgument(format!("unknown suite `{other}` (expected one of {})", SUITES.join(", "))))
        }
    }
    Ok(SuiteReport { suite: name.to_string(), seed, lines: out.0 })
}

#[derive(Default)]
struct Lines(Vec<Line>);

impl Lines {
    fn push(&mut self, criterion: u8, name: impl Into<String>, pass: bool, detail: impl Into<String>) {
        self.0.push(Line { criterion, name: name.into(), pass, detail: detail.into() });
    }
}

/// Worst residual of a batch, with pass iff every residual is within `tol`.
#[derive(Default)]
struct Worst {
    max: f64,
    failures: usize,
    count: usize,
    first_bad: Option<String>,
}

impl Worst {
    fn add(&mut self, r: f64, tol: f64, what: impl FnOnce() -> String) {
        self.count += 1;
        if r.is_nan() || r > tol {
            self.failures += 1;
            if self.first_bad.is_none() {
                self.first_bad = Some(what());
            }
        }
        if !(r <= self.max) {
            self.max = r;
        }
    }

    fn fail(&mut self, what: impl FnOnce() -> String) {
        self.add(f64::INFINITY, 0.0, what);
    }

    fn ok(&self) -> bool {
        self.failures == 0 && self.count > 0
    }

    fn detail(&self, tol: f64) -> String {
        let mut s = format!("{} cases, max residual {:.3e} (tol {tol:.0e})", self.count, self.max);
        if let Some(b) = &self.first_bad {
            s.push_str(&format!(", {} failing, first {b}", self.failures));
        }
        s
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / (1.0 + a.abs().max(b.abs()))
}

/// Residual between extended reals: 0 for equal infinities, ∞ for a mismatch.
fn ext_rel(a: ExtReal, b: ExtReal) -> f64 {
    match (a.finite(), b.finite()) {
        (Some(x), Some(y)) => rel(x, y),
        _ if a == b => 0.0,
        _ => f64::INFINITY,
    }
}

fn kernel(name: &str) -> Result<Kernel> {
    make_kernel(name, &[])
}

fn func(name: &str, params: &[f64], k: &Kernel, side: Side) -> Result<ObjectiveFn> {
    make_function(name, params, k, side)
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

fn kappa_star_exp(s: f64) -> f64 {
    if s == 0.0 {
        0.0
    } else {
        s * s.ln() - s
    }
}

// ---------------------------------------------------------------- item 1

fn counterexamples(out: &mut Lines) -> Result<()> {
    let o = SolverOpts::default();

    let burg = kernel("burg")?;
    let ln = func("ln", &[], &burg, Side::Left)?;
    let mut w = Worst::default();
    for lambda in [0.1, 0.5, 0.9] {
        for y in [0.5, 1.0, 2.0, 5.0] {
            let r = left_prox(&burg, &ln, lambda, &[y], &o)?;
            match (r.status, r.minimizers.as_slice()) {
                (ProxStatus::Nonempty, [x]) => w.add((x[0] - (1.0 - lambda) * y).abs(), 1e-6, || format!("lambda={lambda} y={y}: {x:?}")),
                _ => w.fail(|| format!("lambda={lambda} y={y}: {} {:?}", r.status, r.minimizers)),
            }
        }
    }
    out.push(1, "burg_ln_prox", w.ok(), w.detail(1e-6));
    let t = prox_bound_threshold(&burg, &ln, &[1.0], 10.0, &o)?;
    let width = t.threshold_high - t.threshold_low;
    out.push(
        1,
        "burg_ln_threshold",
        t.threshold_low <= 1.0 && 1.0 <= t.threshold_high && width <= 2e-3,
        format!("bracket [{:.6}, {:.6}], width {width:.3e}", t.threshold_low, t.threshold_high),
    );

    let ek = kernel("exp")?;
    let id = func("id", &[], &ek, Side::Left)?;
    let mut w = Worst::default();
    for lambda in [0.5, 2.0, 3.0] {
        for y in [-1.0, 0.0, 0.5, 1.0, 2.0] {
            let r = left_prox(&ek, &id, lambda, &[y], &o)?;
            let ey = f64::exp(y);
            if ey > lambda {
                let x = (ey - lambda).ln();
                let env = (kappa_star_exp(ey) - kappa_star_exp(ey - lambda)) / lambda;
                match r.minimizers.as_slice() {
                    [m] => w.add((m[0] - x).abs(), 1e-6, || format!("prox at lambda={lambda} y={y}: {m:?} vs {x}")),
                    _ => w.fail(|| format!("lambda={lambda} y={y}: {} {:?}", r.status, r.minimizers)),
                }
                w.add(ext_rel(r.inf_value, ExtReal::from_eval(env)), 1e-6, || format!("env at lambda={lambda} y={y}: {} vs {env}", r.inf_value));
            } else if !(r.minimizers.is_empty() && r.inf_value.is_neg_inf()) {
                w.fail(|| format!("lambda={lambda} y={y}: expected -inf, got {} {}", r.status, r.inf_value));
            } else {
                w.add(0.0, 1e-6, String::new);
            }
        }
    }
    out.push(1, "exp_id_prox_env", w.ok(), w.detail(1e-6));

    let bq = kernel("boxed_quadratic")?;
    let mut w = Worst::default();
    let lambda = 0.5;
    for p in [-0.5, 0.0, 0.3] {
        let f = func("indicator", &[p], &bq, Side::Left)?;
        let hull = LeftHull::new(&bq, &f, lambda, HullOpts::default(), &o)?;
        for x in linspace(-1.0, 1.0, 50) {
            let want = 0.5 * (p * p - x * x + 2.0 * (p - x).abs());
            let got = hull.eval(&[x])?.scale(lambda);
            w.add(ext_rel(got, ExtReal::from_eval(want)), 1e-4, || format!("p={p} x={x}: {got} vs {want}"));
        }
    }
    out.push(1, "boxed_hull_of_indicator", w.ok(), w.detail(1e-4));

    let f = func("indicator", &[0.0], &ek, Side::Left)?;
    let hull = LeftHull::new(&ek, &f, lambda, HullOpts::default(), &o)?;
    let mut w = Worst::default();
    for x in linspace(-3.0, 0.0, 25).into_iter().chain([0.01, 0.1, 0.5, 1.0, 3.0]) {
        let want = if x <= 0.0 { ExtReal::from_eval(1.0 - x.exp()) } else { ExtReal::POS_INF };
        let got = hull.eval(&[x])?.scale(lambda);
        w.add(ext_rel(got, want), 1e-4, || format!("x={x}: {got} vs {want}"));
    }
    out.push(1, "exp_hull_of_indicator", w.ok(), w.detail(1e-4));

    let pw = kernel("piecewise_env_star")?;
    let inv = func("inv", &[], &pw, Side::Right)?;
    let mut statuses = Vec::new();
    let mut ok = true;
    for lambda in [2.0, 3.0] {
        let r = right_prox(&pw, &inv, lambda, &[1.0], &o)?;
        ok &= r.minimizers.is_empty() && r.status == ProxStatus::EmptyInfNotAttained;
        statuses.push(format!("lambda={lambda}: {} inf {:.6}", r.status, r.inf_value.to_f64()));
    }
    out.push(1, "env_star_empty", ok, statuses.join("; "));

    // brute-force oracle on a uniform grid of (0, 5]
    let lambda = 0.1;
    let (mut best_y, mut best_v) = (f64::NAN, f64::INFINITY);
    for i in 1..=500_000 {
        let y = 1e-5 * i as f64;
        let v = 1.0 / y + distance(&pw, &[1.0], &[y]).to_f64() / lambda;
        if v < best_v {
            best_v = v;
            best_y = y;
        }
    }
    let r = right_prox(&pw, &inv, lambda, &[1.0], &o)?;
    let pass = match r.minimizers.as_slice() {
        [m] => (m[0] - best_y).abs() <= 1e-4 && (r.inf_value.to_f64() - best_v).abs() <= 1e-4,
        _ => false,
    };
    out.push(
        1,
        "env_star_nonempty",
        pass,
        format!("prox {:?} env {} vs grid argmin {best_y:.5} value {best_v:.8}", r.minimizers, r.inf_value),
    );

    let epi = EpiComposition::with_method(&pw, &inv, EpiMethod::Legendre)?;
    let mut w = Worst::default();
    for i in 0..20 {
        let xi = -2.0 + 0.1 * (i as f64 + 0.5);
        let want = 2.0 / (xi + 2.0);
        let got = epi.eval(&[xi])?;
        w.add(ext_rel(got, ExtReal::from_eval(want)), 1e-6, || format!("xi={xi}: {got} vs {want}"));
        let xi = 0.05 * i as f64;
        let want = (1.0 - xi).sqrt();
        let got = epi.eval(&[xi])?;
        w.add(ext_rel(got, ExtReal::from_eval(want)), 1e-6, || format!("xi={xi}: {got} vs {want}"));
    }
    out.push(1, "env_star_epi_values", w.ok(), w.detail(1e-6));
    let lsc = epi_comp_lsc_check(&pw, &inv, &conj_probe_grid(&pw), 1e-3)?;
    let at: Vec<String> = lsc.violations.iter().map(|v| format!("{:?}", v.xi)).collect();
    out.push(
        1,
        "env_star_lsc_violation",
        lsc.violations.len() == 1 && lsc.violations[0].xi == vec![1.0],
        format!("violations at [{}]", at.join(", ")),
    );
    Ok(())
}

// ---------------------------------------------------------------- item 2

fn sample_interior(k: &Kernel, rng: &mut ChaCha8Rng) -> Point {
    let log_uniform = |rng: &mut ChaCha8Rng, a: f64, b: f64| rng.gen_range(a.ln()..b.ln()).exp();
    match k.name() {
        "burg" => vec![log_uniform(rng, 1e-2, 1e2)],
        "dragomir2d" => vec![rng.gen_range(-3.0..3.0), log_uniform(rng, 0.1, 10.0)],
        "boxed_quadratic" => vec![rng.gen_range(-0.99..0.99)],
        _ => (0..k.dim()).map(|_| rng.gen_range(-5.0..5.0)).collect(),
    }
}

const LEGENDRE: [&str; 4] = ["euclidean", "burg", "exp", "dragomir2d"];

fn identities(out: &mut Lines, seed: u64) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let o = SolverOpts { seed, ..SolverOpts::default() };

    for name in LEGENDRE {
        let k = kernel(name)?;
        let mut w = Worst::default();
        for _ in 0..100 {
            let (x, y) = (sample_interior(&k, &mut rng), sample_interior(&k, &mut rng));
            let (gx, gy) = (k.grad(&x).unwrap_or_default(), k.grad(&y).unwrap_or_default());
            let scale = 1.0 + k.value(&x).to_f64().abs().max(k.value(&y).to_f64().abs());
            let r = (distance(&k, &x, &y).to_f64() - conj_distance(&k, &gy, &gx).to_f64()).abs() / scale;
            let ok = dual_identity_check(&k, &x, &y, 1e-9)?;
            w.add(if ok { r } else { r.max(f64::INFINITY) }, 1e-9, || format!("x={x:?} y={y:?}"));
        }
        out.push(2, format!("dual_identity[{name}]"), w.ok(), w.detail(1e-9));
    }

    for name in LEGENDRE.iter().chain(&["boxed_quadratic"]) {
        let k = kernel(name)?;
        let (mut three, mut gap) = (Worst::default(), Worst::default());
        for _ in 0..1000 {
            let (x, y, z) = (sample_interior(&k, &mut rng), sample_interior(&k, &mut rng), sample_interior(&k, &mut rng));
            let (gy, gz) = (k.grad(&y).unwrap_or_default(), k.grad(&z).unwrap_or_default());
            let (dxz, dxy, dyz) = (distance(&k, &x, &z).to_f64(), distance(&k, &x, &y).to_f64(), distance(&k, &y, &z).to_f64());
            let cross: f64 = gy.iter().zip(&gz).zip(x.iter().zip(&y)).map(|((a, b), (p, q))| (a - b) * (p - q)).sum();
            let scale = 1.0 + [dxz, dxy, dyz, cross].iter().fold(0.0f64, |m, t| m.max(t.abs()));
            three.add((dxz - dxy - dyz - cross).abs() / scale, 1e-9, || format!("x={x:?} y={y:?} z={z:?}"));
            let gf = gap_form(&k, &x, &y)?.to_f64();
            let scale = 1.0 + k.value(&x).to_f64().abs().max(k.value(&y).to_f64().abs());
            gap.add((gf - dxy).abs() / scale, 1e-9, || format!("x={x:?} y={y:?}: {gf} vs {dxy}"));
        }
        out.push(2, format!("three_point[{name}]"), three.ok(), three.detail(1e-9));
        out.push(2, format!("gap_form[{name}]"), gap.ok(), gap.detail(1e-9));
    }

    // conjugate forms of the envelopes, 20 points per instance
    let left_cases: [(&str, &str, f64, f64, f64); 3] =
        [("exp", "id", 0.5, -0.5, 2.0), ("burg", "ln", 0.5, 0.2, 5.0), ("euclidean", "double_well", 0.25, -2.0, 2.0)];
    for (kn, fname, lambda, lo, hi) in left_cases {
        let k = kernel(kn)?;
        let f = func(fname, &[], &k, Side::Left)?;
        let mut w = Worst::default();
        for y in linspace(lo, hi, 20) {
            let a = env_conjugate_form(&k, &f, lambda, &[y], None, &o)?;
            let b = left_env(&k, &f, lambda, &[y], &o)?.scale(lambda);
            w.add(ext_rel(a, b), 1e-5, || format!("y={y}: {a} vs {b}"));
        }
        out.push(2, format!("left_conjugate_form[{kn}/{fname}]"), w.ok(), w.detail(1e-5));
    }
    let right_cases: [(&str, &str, f64, f64, f64); 3] = [
        ("exp", "sq", 1.0, -2.0, 2.0),
        ("piecewise_env_star", "inv", 0.1, 0.5, 2.0),
        ("euclidean", "double_well", 0.25, -2.0, 2.0),
    ];
    for (kn, gname, lambda, lo, hi) in right_cases {
        let k = kernel(kn)?;
        let g = func(gname, &[], &k, Side::Right)?;
        let mut w = Worst::default();
        for x in linspace(lo, hi, 20) {
            let a = right_env_conjugate_form(&k, &g, lambda, &[x], None, &o)?;
            let b = right_env(&k, &g, lambda, &[x], &o)?.scale(lambda);
            w.add(ext_rel(a, b), 1e-5, || format!("x={x}: {a} vs {b}"));
        }
        out.push(2, format!("right_conjugate_form[{kn}/{gname}]"), w.ok(), w.detail(1e-5));
    }

    // change of kernel; the ψ = j rows are the Euclidean forms
    let j = kernel("euclidean")?;
    let left_dgf: [(&str, &str, f64, f64, f64); 2] = [("burg", "ln", 0.5, 0.2, 5.0), ("exp", "id", 0.5, -0.5, 2.0)];
    for (kn, fname, lambda, lo, hi) in left_dgf {
        let k = kernel(kn)?;
        let f = func(fname, &[], &k, Side::Left)?;
        for (psi, tag) in [(&k, "kappa"), (&j, "j")] {
            let mut w = Worst::default();
            for _ in 0..20 {
                let y = rng.gen_range(lo..hi);
                let r = change_dgf_left_check(&k, psi, &f, lambda, &[y], DGF_PROX_TOL, &o)?;
                record_dgf(&mut w, &r, y);
            }
            out.push(2, format!("change_dgf_left[{kn}/{fname}, psi={tag}]"), w.ok(), w.detail(DGF_ENV_TOL));
        }
    }
    let right_dgf: [(&str, &str, f64, f64, f64); 2] = [("exp", "sq", 1.0, -2.0, 2.0), ("burg", "ln", 0.5, 0.2, 5.0)];
    for (kn, gname, lambda, lo, hi) in right_dgf {
        let k = kernel(kn)?;
        let g = func(gname, &[], &k, Side::Right)?;
        for (psi, tag) in [(&k, "kappa"), (&j, "j")] {
            let mut w = Worst::default();
            for _ in 0..20 {
                let x = rng.gen_range(lo..hi);
                let r = change_dgf_right_check(&k, psi, &g, lambda, &[x], DGF_PROX_TOL, &o)?;
                record_dgf(&mut w, &r, x);
            }
            out.push(2, format!("change_dgf_right[{kn}/{gname}, psi={tag}]"), w.ok(), w.detail(DGF_ENV_TOL));
        }
    }
    Ok(())
}

/// Envelope values are compared at the exact tolerance; minimizer locations
/// are only determined to about the square root of machine precision.
const DGF_ENV_TOL: f64 = 1e-9;
const DGF_PROX_TOL: f64 = 1e-6;

fn record_dgf(w: &mut Worst, r: &crate::left::ChangeDgfReport, at: f64) {
    if !r.prox_agree {
        w.fail(|| format!("at {at}: prox sets {:?} vs {:?}", r.lhs_set, r.rhs_set));
    }
    w.add(ext_rel(r.env_lhs, r.env_rhs), DGF_ENV_TOL, || format!("at {at}: env {} vs {}", r.env_lhs, r.env_rhs));
}

// ---------------------------------------------------------------- item 3

fn random_instance(rng: &mut ChaCha8Rng, max: usize) -> Result<(Coupling<i64>, Vec<Ext<i64>>)> {
    let (nx, ny) = (rng.gen_range(1..=max), rng.gen_range(1..=max));
    let c = Coupling::new(nx, ny, (0..nx * ny).map(|_| rng.gen_range(-20..=20)).collect())?;
    let mut f: Vec<_> =
        (0..nx).map(|_| if rng.gen_bool(0.25) { Ext::PosInf } else { Ext::Finite(rng.gen_range(-20..=20)) }).collect();
    let k = rng.gen_range(0..nx);
    f[k] = Ext::Finite(rng.gen_range(-20..=20));
    Ok((c, f))
}

fn phi_exact(out: &mut Lines, seed: u64) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let (mut young, mut below, mut tri, mut four) = (0usize, 0usize, 0usize, 0usize);
    let mut firsts: Vec<String> = Vec::new();
    let n = 10_000;
    for t in 0..n {
        let (c, f) = random_instance(&mut rng, 12)?;
        let conj = phi_conjugate(&c, &f)?;
        let bi = phi_biconjugate(&c, &f)?;
        let mut y_ok = true;
        for i in 0..c.n_x {
            for j in 0..c.n_y {
                if let (Ext::Finite(a), Ext::Finite(b)) = (&f[i], &conj[j]) {
                    y_ok &= a + b >= *c.phi(i, j);
                }
            }
        }
        young += y_ok as usize;
        let b_ok = bi.iter().zip(&f).all(|(b, v)| match (b, v) {
            (_, Ext::PosInf) => true,
            (Ext::Finite(b), Ext::Finite(v)) => b <= v,
            (Ext::NegInf, _) => true,
            _ => false,
        });
        below += b_ok as usize;
        let t_ok = phi_conjugate(&c, &bi)? == conj;
        tri += t_ok as usize;
        let (i, j) = (rng.gen_range(0..c.n_x), rng.gen_range(0..c.n_y));
        let r = fy_duality_check(&c, &f, i, j)?;
        four += r.consistent() as usize;
        if !(y_ok && b_ok && t_ok && r.consistent()) && firsts.len() < 3 {
            firsts.push(format!("instance {t}"));
        }
    }
    let detail = |k: usize| {
        let mut s = format!("{k}/{n} instances exact");
        if k < n {
            s.push_str(&format!(", failing {}", firsts.join(", ")));
        }
        s
    };
    out.push(3, "young_fenchel", young == n, detail(young));
    out.push(3, "biconjugate_below", below == n, detail(below));
    out.push(3, "triconjugacy", tri == n, detail(tri));
    out.push(3, "duality_four_way", four == n, detail(four));

    // the Bregman coupling itself, converted to exact rationals
    let k = kernel("burg")?;
    let grid: Vec<Point> = (1..=10).map(|i| vec![0.25 * i as f64]).collect();
    let c = exact_coupling(&bregman_coupling(&k, 0.5, &grid, &grid)?)?;
    let mut ok = 0;
    for _ in 0..100 {
        let f: Vec<Ext<BigRational>> = (0..grid.len())
            .map(|_| {
                if rng.gen_bool(0.2) {
                    Ext::PosInf
                } else {
                    Ext::Finite(BigRational::new(BigInt::from(rng.gen_range(-40..=40)), BigInt::from(8)))
                }
            })
            .collect();
        let mut f = f;
        f[0] = Ext::Finite(BigRational::new(BigInt::from(rng.gen_range(-40..=40)), BigInt::from(8)));
        let conj = phi_conjugate(&c, &f)?;
        let bi = phi_biconjugate(&c, &f)?;
        ok += (phi_conjugate(&c, &bi)? == conj) as usize;
    }
    out.push(3, "bregman_coupling_triconjugacy", ok == 100, format!("{ok}/100 rational instances exact"));
    Ok(())
}

// ---------------------------------------------------------------- item 4

/// For an objective convex along the grid, the continuous minimum is at most
/// one grid step times the steeper adjacent secant below the grid minimum.
fn grid_min_bound(vals: &[f64]) -> (f64, f64) {
    let (i, &m) = vals.iter().enumerate().fold((0, &f64::INFINITY), |b, (i, v)| if *v < *b.1 { (i, v) } else { b });
    let left = if i > 0 { (vals[i - 1] - m).abs() } else { 0.0 };
    let right = if i + 1 < vals.len() { (vals[i + 1] - m).abs() } else { 0.0 };
    (m, left.max(right))
}

/// Grid envelope minus continuous envelope, which must lie in `[0, bound]`
/// up to rounding.
#[derive(Default)]
struct Excess {
    max_excess: f64,
    max_bound: f64,
    count: usize,
    first_bad: Option<String>,
}

impl Excess {
    fn add(&mut self, excess: f64, bound: f64, what: impl FnOnce() -> String) {
        self.count += 1;
        self.max_excess = self.max_excess.max(excess.abs());
        self.max_bound = self.max_bound.max(bound);
        if !(excess >= -1e-9 && excess <= bound + 1e-9) && self.first_bad.is_none() {
            self.first_bad = Some(what());
        }
    }

    fn ok(&self) -> bool {
        self.first_bad.is_none() && self.count > 0
    }

    fn detail(&self) -> String {
        let mut s = format!(
            "{} shared points, max |grid - env| {:.3e}, largest secant bound {:.3e}",
            self.count, self.max_excess, self.max_bound
        );
        if let Some(b) = &self.first_bad {
            s.push_str(&format!(", first failure {b}"));
        }
        s
    }
}

fn coupling_consistency(out: &mut Lines) -> Result<()> {
    let o = SolverOpts::default();
    // (kernel, left f, right g, λ, grid lo, grid step, grid size)
    let cases: [(&str, &str, &str, f64, f64, f64, usize); 2] =
        [("burg", "ln", "ln", 0.5, 0.01, 0.01, 400), ("euclidean", "sq", "sq", 0.5, -2.0, 0.01, 401)];
    for (kn, fname, gname, lambda, lo, h, n) in cases {
        let k = kernel(kn)?;
        let grid: Vec<Point> = (0..n).map(|i| vec![lo + h * i as f64]).collect();
        let c = bregman_coupling(&k, lambda, &grid, &grid)?;
        let shared: Vec<usize> = (0..n).step_by(20).skip(1).collect();

        let f = func(fname, &[], &k, Side::Left)?;
        let fv: Vec<Ext<f64>> = grid.iter().map(|x| Ext::Finite(f.eval(x).to_f64())).collect();
        let conj = phi_conjugate(&c, &fv)?;
        let mut w = Excess::default();
        for &j in &shared {
            let Ext::Finite(cj) = conj[j] else { continue };
            let grid_env = -cj;
            let col: Vec<f64> = (0..n).map(|i| f.eval(&grid[i]).to_f64() - c.phi(i, j)).collect();
            let (_, bound) = grid_min_bound(&col);
            let env = left_env(&k, &f, lambda, &grid[j], &o)?.to_f64();
            // grid env ≥ env, and exceeds it by at most the secant bound
            w.add(grid_env - env, bound, || format!("y={:?}: grid {grid_env} env {env} bound {bound:.3e}", grid[j]));
        }
        out.push(4, format!("left_grid_conjugate[{kn}/{fname}]"), w.ok(), w.detail());

        let g = func(gname, &[], &k, Side::Right)?;
        let gv: Vec<Ext<f64>> = grid.iter().map(|y| Ext::Finite(g.eval(y).to_f64())).collect();
        let flipped = c.flipped();
        let conj = phi_conjugate(&flipped, &gv)?;
        let mut w = Excess::default();
        for &i in &shared {
            let Ext::Finite(ci) = conj[i] else { continue };
            let grid_env = -ci;
            let row: Vec<f64> = (0..n).map(|j| g.eval(&grid[j]).to_f64() - c.phi(i, j)).collect();
            let (_, bound) = grid_min_bound(&row);
            let env = right_env(&k, &g, lambda, &grid[i], &o)?.to_f64();
            w.add(grid_env - env, bound, || format!("x={:?}: grid {grid_env} env {env} bound {bound:.3e}", grid[i]));
        }
        out.push(4, format!("right_grid_conjugate[{kn}/{gname}]"), w.ok(), w.detail());
    }
    Ok(())
}

// ---------------------------------------------------------------- item 5

fn verdict_line(out: &mut Lines, name: &str, op: &SampledOperator, x: f64, osc: Option<bool>, usc: Option<bool>, lb: Option<bool>) -> Result<()> {
    let mut parts = Vec::new();
    let mut pass = true;
    let mut check = |label: &str, want: Option<bool>, got: bool| {
        if let Some(w) = want {
            pass &= w == got;
            parts.push(format!("{label}={got}"));
        }
    };
    check("osc", osc, if osc.is_some() { check_osc(op, &[x], OSC_TOL)?.holds } else { false });
    check("usc", usc, if usc.is_some() { check_usc(op, &[x], &USC_EPS)?.holds } else { false });
    check("lb", lb, if lb.is_some() { check_local_bounded(op, &[x], &LB_RADII)?.holds } else { false });
    out.push(5, format!("{name} at {x}"), pass, parts.join(" "));
    Ok(())
}

fn set_valued(out: &mut Lines) -> Result<()> {
    let o = SolverOpts::default();
    verdict_line(out, "T1 into (0,1]", &ops::osc_target_t1(), 0.0, Some(true), Some(false), None)?;
    verdict_line(out, "T2 into [0,1]", &ops::osc_target_t2(), 0.0, Some(false), None, None)?;
    verdict_line(out, "T1 = 1/x", &ops::reciprocal_t1(), 0.5, None, Some(true), Some(true))?;
    verdict_line(out, "T2 = 1/x, T(0) = {0}", &ops::reciprocal_t2(vec![0.0]), 0.0, None, Some(false), Some(false))?;

    let burg = kernel("burg")?;
    let zero = func("zero", &[], &burg, Side::Left)?;
    let y = Domain::interval(Interval::open(0.0, f64::INFINITY));
    let rel_y = left_prox_operator(&burg, &zero, 1.0, y.clone(), y, &o);
    for p in [1e-3, 0.5, 2.0] {
        verdict_line(out, "prox of zero relative to Y", &rel_y, p, Some(true), Some(true), None)?;
    }
    let rel_r = left_prox_operator(&burg, &zero, 1.0, Domain::real_space(1), Domain::real_space(1), &o);
    verdict_line(out, "prox of zero relative to R", &rel_r, 0.0, Some(false), Some(false), None)?;

    let probes01: Vec<Point> = [0.0, 0.25, 0.5, 0.75, 1.0].iter().map(|&t| vec![t]).collect();
    let open01: Vec<Point> = [0.1, 0.25, 0.5, 0.75, 0.9].iter().map(|&t| vec![t]).collect();
    let catalog: Vec<(SampledOperator, Vec<Point>)> = vec![
        (ops::osc_target_t1(), probes01.clone()),
        (ops::osc_target_t2(), probes01.clone()),
        (ops::reciprocal_t1(), open01.clone()),
        (ops::reciprocal_t2(vec![0.0]), [0.0, 0.25, 0.5].iter().map(|&t| vec![t]).collect()),
        (ops::identity_closed(), probes01.clone()),
        (ops::empty_near_origin(), probes01),
        (rel_y, [1e-3, 0.5, 2.0].iter().map(|&t| vec![t]).collect()),
        (rel_r, [-1.0, 0.0, 0.5].iter().map(|&t| vec![t]).collect()),
    ];
    let mut violations = Vec::new();
    for (op, probes) in &catalog {
        let r = implication_matrix(op, probes)?;
        violations.extend(r.violations.iter().map(|v| format!("{}: {v}", op.label)));
    }
    out.push(
        5,
        "implication_arrows",
        violations.is_empty(),
        if violations.is_empty() { format!("{} operators, no arrow violated", catalog.len()) } else { violations.join("; ") },
    );
    Ok(())
}

// ---------------------------------------------------------------- item 6

fn smoothness(out: &mut Lines) -> Result<()> {
    let inst = smooth::dragomir();
    let r = equivalence_suite(&inst)?;
    for (label, rep) in [("rel_smooth", &r.rel_smooth), ("bcoco", &r.bcoco), ("ext_bcoco", &r.ext_bcoco), ("astar", &r.astar)] {
        out.push(
            6,
            format!("dragomir2d {label}"),
            rep.consistent() && rep.max_violation <= TOL_EXACT,
            format!("{} pairs, max violation {:.3e}", rep.checked_pairs, rep.max_violation.max(0.0)),
        );
    }
    out.push(6, "dragomir2d agreement", r.agree, format!("verdicts agree: {}", r.agree));
    let mono = smooth::y_monotonicity();
    out.push(6, "dragomir2d y_monotonicity", mono, format!("monotone on the lattice: {mono}"));
    let w = strict_convexity_probe(&inst.fstar, &smooth::parabola_lattice(), 1e-12);
    out.push(
        6,
        "indicator_of_d_not_strictly_convex",
        w.is_some(),
        w.map_or("no witness".into(), |(a, b)| format!("midpoint gap 0 between {a:?} and {b:?}")),
    );
    let r = equivalence_suite(&smooth::euclidean_quadratic(2.0))?;
    for (label, rep) in [("rel_smooth", &r.rel_smooth), ("bcoco", &r.bcoco)] {
        let witness = rep.witnesses.first();
        out.push(
            6,
            format!("euclidean sq {label} fails"),
            !rep.consistent() && witness.is_some(),
            witness.map_or("no witness".into(), |w| format!("witness {:?} residual {:.3e}", w.0, w.1)),
        );
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suite() {
        assert!(matches!(run_suite("nope", 0), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn worst_tracks_failures() {
        let mut w = Worst::default();
        w.add(1e-12, 1e-9, String::new);
        assert!(w.ok());
        w.add(f64::NAN, 1e-9, || "nan".into());
        assert!(!w.ok() && w.detail(1e-9).contains("first nan"));
    }

    #[test]
    fn secant_bound() {
        let (m, b) = grid_min_bound(&[3.0, 1.0, 2.0]);
        assert_eq!((m, b), (1.0, 2.0));
    }
}
