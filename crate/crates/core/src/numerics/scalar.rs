//! One-dimensional minimization over an interval that may be open,
//! half-infinite or the whole line.
//!
//! A transformed-coordinate scan locates the basins, Brent's method polishes
//! each of them, and every open or infinite end is examined by a probe
//! sequence that decides between "a minimizer sits near the edge", "the
//! infimum is only approached" and "the objective escapes to −∞".

use super::domain::Interval;
use super::extreal::ExtReal;
use super::objective::{ProxResult, ProxStatus, SolverOpts};
use crate::error::{Error, Result};

const GOLDEN: f64 = 0.381_966_011_250_105_1;

/// Brent's method on `[a, b]` started from `x0`. Infinite values are allowed;
/// parabolic steps are skipped whenever one of the three points is infinite.
pub fn brent(f: &dyn Fn(f64) -> f64, a: f64, b: f64, x0: f64, fx0: f64, tol: f64) -> (f64, f64) {
    let (mut a, mut b) = if a < b { (a, b) } else { (b, a) };
    // narrow brackets (near an edge) get a proportionally finer tolerance
    let tol = tol.min(1e-6 * (b - a)).max(f64::MIN_POSITIVE);
    let (mut x, mut w, mut v) = (x0, x0, x0);
    let (mut fx, mut fw, mut fv) = (fx0, fx0, fx0);
    let mut d: f64 = 0.0;
    let mut e: f64 = 0.0;
    for _ in 0..200 {
        let xm = 0.5 * (a + b);
        let tol1 = 1.5e-8 * x.abs() + tol;
        let tol2 = 2.0 * tol1;
        if (x - xm).abs() <= tol2 - 0.5 * (b - a) {
            break;
        }
        let mut golden = true;
        if e.abs() > tol1 && fx.is_finite() && fw.is_finite() && fv.is_finite() {
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            }
            q = q.abs();
            let etemp = e;
            e = d;
            if p.abs() < (0.5 * q * etemp).abs() && p > q * (a - x) && p < q * (b - x) {
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = if xm >= x { tol1 } else { -tol1 };
                }
                golden = false;
            }
        }
        if golden {
            e = if x >= xm { a - x } else { b - x };
            d = GOLDEN * e;
        }
        let u = if d.abs() >= tol1 { x + d } else if d > 0.0 { x + tol1 } else { x - tol1 };
        let fu = f(u);
        if fu <= fx {
            if u >= x {
                a = x;
            } else {
                b = x;
            }
            v = w;
            fv = fw;
            w = x;
            fw = fx;
            x = u;
            fx = fu;
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                v = w;
                fv = fw;
                w = u;
                fw = fu;
            } else if fu <= fv || v == x || v == w {
                v = u;
                fv = fu;
            }
        }
    }
    (x, fx)
}

fn linspace(a: f64, b: f64, n: usize) -> impl Iterator<Item = f64> {
    let step = if n > 1 { (b - a) / (n - 1) as f64 } else { 0.0 };
    (0..n).map(move |i| a + step * i as f64)
}

/// Scan abscissae for `iv`, sorted and strictly inside except for closed ends.
fn scan_points(iv: &Interval, n: usize) -> Vec<f64> {
    let n = n.max(16);
    let mut xs = Vec::with_capacity(n + 16);
    match (iv.lo.is_finite(), iv.hi.is_finite()) {
        (true, true) => {
            let w = iv.hi - iv.lo;
            xs.extend((0..n).map(|i| iv.lo + w * (i as f64 + 0.5) / n as f64));
            for k in 2..=6 {
                let d = w * 10f64.powi(-k);
                xs.push(iv.lo + d);
                xs.push(iv.hi - d);
            }
        }
        (true, false) => xs.extend(linspace(-6.0, 6.0, n).map(|u| iv.lo + 10f64.powf(u))),
        (false, true) => xs.extend(linspace(-6.0, 6.0, n).map(|u| iv.hi - 10f64.powf(u))),
        (false, false) => {
            xs.extend(linspace(-10.0, 10.0, n / 2 + 1));
            for u in linspace(1.1, 6.0, n / 4) {
                let t = 10f64.powf(u);
                xs.push(t);
                xs.push(-t);
            }
        }
    }
    if iv.lo_closed {
        xs.push(iv.lo);
    }
    if iv.hi_closed {
        xs.push(iv.hi);
    }
    xs.retain(|&x| iv.contains(x));
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    xs
}

fn noise(v: f64) -> f64 {
    1e-13 * (1.0 + v.abs())
}

/// Rounding allowance at abscissa `p`: objectives like `x + D(x, ȳ)` cancel
/// terms of size `|p|` down to `O(1)`.
fn noise_at(v: f64, p: f64) -> f64 {
    noise(v) + 4.0 * f64::EPSILON * p.abs()
}

enum Edge {
    /// A minimizer lies between the two abscissae.
    Turn(f64, f64),
    /// Values decrease all the way; `limit` estimates the infimum.
    Limit { limit: f64, last: f64 },
    Unbounded(String),
}

/// Walks from the inner sample `(xb, vb)` and the edge-most sample `(xa, va)`
/// towards `edge` along a geometric sequence.
fn probe_edge(
    f: &dyn Fn(f64) -> f64,
    xb: f64,
    vb: f64,
    xa: f64,
    va: f64,
    edge: f64,
    opts: &SolverOpts,
) -> Edge {
    let mut seq = vec![(xb, vb), (xa, va)];
    if edge.is_finite() {
        let sign = (xa - edge).signum();
        let floor = opts.margin_floor.max(8.0 * f64::EPSILON * edge.abs());
        let mut d = (xa - edge).abs();
        loop {
            d /= 10.0;
            if d < floor {
                break;
            }
            let p = edge + sign * d;
            if p == edge {
                break;
            }
            seq.push((p, f(p)));
        }
    } else {
        let sign = edge.signum();
        let start = xa.abs().max(1.0).log10().floor() as i32 + 1;
        // beyond 2^53 integers are no longer exact and cancellation takes over
        for k in start..=15 {
            let p = sign * 10f64.powi(k);
            seq.push((p, f(p)));
        }
    }
    for k in 1..seq.len() {
        let (p, w) = seq[k];
        if w < -opts.escape {
            return Edge::Unbounded(format!(
                "objective {w:e} < -{:e} at {p:e} approaching {edge}",
                opts.escape
            ));
        }
        let prev = seq[k - 1].1;
        if !(w <= prev + noise_at(prev, p)) {
            // first increase: the minimum lies around seq[k-1]
            let lo = seq[k.saturating_sub(2)].0;
            return Edge::Turn(lo, p);
        }
    }
    let m = seq.len();
    let d1 = seq[m - 2].1 - seq[m - 1].1;
    let d0 = seq[m - 3.min(m)].1 - seq[m - 2].1;
    let last = seq[m - 1].1;
    if d1 > noise_at(last, seq[m - 1].0) && d0 > 0.0 {
        let r = d1 / d0;
        if r > 0.5 {
            return Edge::Unbounded(format!(
                "decrements do not contract (ratio {r:.3}) approaching {edge}; last value {last:e}"
            ));
        }
        return Edge::Limit { limit: last - d1 * r / (1.0 - r), last: seq[m - 1].0 };
    }
    Edge::Limit { limit: last, last: seq[m - 1].0 }
}

/// Minimizes `obj` over the interval `bracket`.
pub fn minimize_scalar(
    obj: &dyn Fn(f64) -> ExtReal,
    bracket: Interval,
    opts: &SolverOpts,
) -> Result<ProxResult> {
    if !(bracket.lo < bracket.hi) {
        return Err(Error::InvalidBracket(format!("[{}, {}] has empty interior", bracket.lo, bracket.hi)));
    }
    let f = |x: f64| -> f64 {
        if bracket.contains(x) {
            obj(x).to_f64()
        } else {
            f64::INFINITY
        }
    };
    let xs = scan_points(&bracket, opts.scan_points);
    let vs: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    let n = xs.len();

    if let Some(i) = vs.iter().position(|&v| v < -opts.escape) {
        return Ok(ProxResult::unbounded(format!(
            "objective {:e} < -{:e} at x = {:e}",
            vs[i], opts.escape, xs[i]
        )));
    }
    if vs.iter().all(|v| *v == f64::INFINITY) {
        return Ok(ProxResult::all_infinite());
    }

    let mut candidates: Vec<(f64, f64)> = Vec::new();
    let mut limits: Vec<(f64, f64)> = Vec::new();
    let mut certificate = String::new();

    for i in 0..n {
        let v = vs[i];
        if !v.is_finite() {
            continue;
        }
        let left_ok = i == 0 || v < vs[i - 1];
        let right_ok = i + 1 == n || v <= vs[i + 1];
        if !(left_ok && right_ok) {
            continue;
        }
        let at_lo = i == 0;
        let at_hi = i + 1 == n;
        let is_closed_end = (at_lo && bracket.lo_closed && xs[i] == bracket.lo)
            || (at_hi && bracket.hi_closed && xs[i] == bracket.hi);
        if is_closed_end {
            candidates.push((xs[i], v));
        }
        let open_edge = if at_lo && !is_closed_end {
            Some(bracket.lo)
        } else if at_hi && !is_closed_end {
            Some(bracket.hi)
        } else {
            None
        };
        if let Some(edge) = open_edge {
            if n < 2 {
                candidates.push((xs[i], v));
                continue;
            }
            let j = if at_lo { 1 } else { n - 2 };
            match probe_edge(&f, xs[j], vs[j], xs[i], v, edge, opts) {
                Edge::Turn(a, b) => {
                    let (x0, f0) = best_of(&f, a, b);
                    candidates.push(brent(&f, a, b, x0, f0, opts.tol_1d));
                }
                Edge::Limit { limit, last } => {
                    certificate = format!("values decrease towards {edge}; last probe {last:e}");
                    limits.push((limit, last));
                }
                Edge::Unbounded(cert) => return Ok(ProxResult::unbounded(cert)),
            }
            continue;
        }
        let a = xs[i.saturating_sub(1)];
        let b = xs[(i + 1).min(n - 1)];
        candidates.push(brent(&f, a, b, xs[i], v, opts.tol_1d));
    }

    let best = candidates.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
    let best_limit = limits.iter().map(|l| l.0).fold(f64::INFINITY, f64::min);
    if best_limit < -opts.escape {
        return Ok(ProxResult::unbounded(format!("extrapolated infimum {best_limit:e}")));
    }
    if best_limit.is_finite() && !(best <= best_limit + opts.cluster_tol) {
        return Ok(ProxResult {
            inf_value: ExtReal::from_eval(best_limit),
            minimizers: Vec::new(),
            status: ProxStatus::EmptyInfNotAttained,
            certificate,
        });
    }
    if !best.is_finite() {
        return Ok(ProxResult::all_infinite());
    }
    let minimizers = cluster(
        candidates.iter().filter(|c| c.1 <= best + opts.cluster_tol).map(|c| c.0),
        opts.cluster_tol,
    );
    Ok(ProxResult {
        inf_value: ExtReal::from_eval(best),
        minimizers: minimizers.into_iter().map(|x| vec![x]).collect(),
        status: ProxStatus::Nonempty,
        certificate: format!("{} basin(s) refined", candidates.len()),
    })
}

fn best_of(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let m = 0.5 * (a + b);
    let pts = [a + 0.25 * (b - a), m, a + 0.75 * (b - a)];
    pts.iter()
        .map(|&x| (x, f(x)))
        .fold((m, f64::INFINITY), |acc, c| if c.1 < acc.1 { c } else { acc })
}

fn cluster(xs: impl Iterator<Item = f64>, tol: f64) -> Vec<f64> {
    let mut v: Vec<f64> = xs.collect();
    v.sort_by(f64::total_cmp);
    let mut out: Vec<f64> = Vec::new();
    for x in v {
        match out.last() {
            Some(&l) if (x - l).abs() <= tol * (1.0 + l.abs()) => {}
            _ => out.push(x),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ext(f: impl Fn(f64) -> f64) -> impl Fn(f64) -> ExtReal {
        move |x| ExtReal::from_eval(f(x))
    }

    #[test]
    fn quadratic_vertex() {
        let r = minimize_scalar(&ext(|x| (x - 2.0).powi(2)), Interval::closed(0.0, 5.0), &SolverOpts::default()).unwrap();
        assert_eq!(r.status, ProxStatus::Nonempty);
        assert!((r.minimizers[0][0] - 2.0).abs() < 1e-7);
        assert!(r.inf_value.finite().unwrap() < 1e-14);
    }

    #[test]
    fn linear_escape() {
        let r = minimize_scalar(&ext(|x| -x), Interval::open(0.0, f64::INFINITY), &SolverOpts::default()).unwrap();
        assert_eq!(r.status, ProxStatus::UnboundedBelow);
        assert_eq!(r.inf_value, ExtReal::NEG_INF);
        assert!(!r.certificate.is_empty());
    }

    #[test]
    fn logarithmic_escape_at_an_open_end() {
        let r = minimize_scalar(&ext(|x| 0.5 * x.ln() + x), Interval::open(0.0, f64::INFINITY), &SolverOpts::default()).unwrap();
        assert_eq!(r.status, ProxStatus::UnboundedBelow);
    }

    #[test]
    fn decreasing_to_a_finite_limit() {
        // g(y) = 1/y with the kernel pieces of the lsc counterexample, λ = 2, x̄ = 1
        let lam = 2.0;
        let obj = move |y: f64| {
            if y >= 1.0 {
                (y - 1.0).powi(2) / (lam * y * y) + 1.0 / y
            } else {
                (1.0 - y).powi(2) / lam + 1.0 / y
            }
        };
        let r = minimize_scalar(&ext(obj), Interval::open(0.0, f64::INFINITY), &SolverOpts::default()).unwrap();
        assert_eq!(r.status, ProxStatus::EmptyInfNotAttained);
        assert!((r.inf_value.finite().unwrap() - 0.5).abs() < 1e-9);
        assert!(r.minimizers.is_empty());
    }

    #[test]
    fn closed_endpoint_minimizer() {
        let r = minimize_scalar(&ext(|x| x), Interval::closed(-1.0, 1.0), &SolverOpts::default()).unwrap();
        assert_eq!(r.minimizers, vec![vec![-1.0]]);
    }

    #[test]
    fn minimizer_close_to_an_open_end() {
        let r = minimize_scalar(&ext(|x| x - 1e-9 * x.ln()), Interval::open(0.0, 1.0), &SolverOpts::default()).unwrap();
        assert_eq!(r.status, ProxStatus::Nonempty);
        assert!((r.minimizers[0][0] - 1e-9).abs() < 1e-12);
    }

    #[test]
    fn two_global_minimizers() {
        let r = minimize_scalar(&ext(|x| (x * x - 1.0).powi(2)), Interval::real_line(), &SolverOpts::default()).unwrap();
        assert_eq!(r.minimizers.len(), 2);
        assert!((r.minimizers[0][0] + 1.0).abs() < 1e-6);
        assert!((r.minimizers[1][0] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn empty_interior_is_an_error() {
        let e = minimize_scalar(&ext(|x| x), Interval::closed(1.0, 1.0), &SolverOpts::default());
        assert!(matches!(e, Err(Error::InvalidBracket(_))));
    }

    #[test]
    fn all_infinite() {
        let r = minimize_scalar(&|_| ExtReal::POS_INF, Interval::real_line(), &SolverOpts::default()).unwrap();
        assert_eq!(r.status, ProxStatus::AllInfinite);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]
            #[test]
            fn stationary_at_interior_minimizer(c in -5.0f64..5.0, a in 0.1f64..10.0, b in -2.0f64..2.0) {
                // strictly convex C¹: a(x−c)² + e^{b x}
                let f = move |x: f64| a * (x - c).powi(2) + (b * x).exp();
                let r = minimize_scalar(&ext(f), Interval::real_line(), &SolverOpts::default()).unwrap();
                prop_assert_eq!(r.status, ProxStatus::Nonempty);
                let x = r.minimizers[0][0];
                let h = 1e-6 * (1.0 + x.abs());
                let d = (f(x + h) - f(x - h)) / (2.0 * h);
                prop_assert!(d.abs() < 1e-4, "derivative {} at {}", d, x);
            }
        }
    }
}
