//! Multistart Nelder–Mead for desk-scale (dim ≤ 4) problems, and the
//! dispatcher that picks the right minimizer for a domain.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::domain::{Domain, Interval, Point};
use super::extreal::ExtReal;
use super::objective::{ProxResult, ProxStatus, SolverOpts};
use super::scalar::minimize_scalar;
use crate::error::{Error, Result};

pub const MAX_DIM: usize = 4;

fn nelder_mead(f: &dyn Fn(&[f64]) -> f64, start: &[f64], step: f64, tol: f64, escape: f64) -> (Point, f64) {
    let n = start.len();
    let mut simplex: Vec<(Point, f64)> = Vec::with_capacity(n + 1);
    simplex.push((start.to_vec(), f(start)));
    for i in 0..n {
        // shrink the initial edge until the vertex is feasible
        let mut h = step * start[i].abs().max(1.0);
        let mut v = start.to_vec();
        for _ in 0..40 {
            v[i] = start[i] + h;
            if f(&v).is_finite() {
                break;
            }
            h *= -0.5;
        }
        let fv = f(&v);
        simplex.push((v, fv));
    }
    let centroid = |s: &[(Point, f64)]| -> Point {
        let mut c = vec![0.0; n];
        for (p, _) in &s[..n] {
            for (ci, pi) in c.iter_mut().zip(p) {
                *ci += pi / n as f64;
            }
        }
        c
    };
    let lerp = |a: &[f64], b: &[f64], t: f64| -> Point { a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect() };
    for _ in 0..(4000 * n) {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0].1;
        if best < -escape {
            break;
        }
        let worst = simplex[n].1;
        let diam = simplex[1..]
            .iter()
            .map(|(p, _)| p.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        let scale = simplex[0].0.iter().fold(1.0f64, |m, x| m.max(x.abs()));
        if diam <= tol * scale && (worst - best).abs() <= tol * (1.0 + best.abs()) {
            break;
        }
        let c = centroid(&simplex);
        let xr = lerp(&c, &simplex[n].0, -1.0);
        let fr = f(&xr);
        if fr < simplex[0].1 {
            let xe = lerp(&c, &simplex[n].0, -2.0);
            let fe = f(&xe);
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
        } else {
            let (xc, fc) = if fr < simplex[n].1 {
                let x = lerp(&c, &xr, 0.5);
                let v = f(&x);
                (x, v)
            } else {
                let x = lerp(&c, &simplex[n].0, 0.5);
                let v = f(&x);
                (x, v)
            };
            if fc < simplex[n].1.min(fr) {
                simplex[n] = (xc, fc);
            } else {
                let x0 = simplex[0].0.clone();
                for s in simplex.iter_mut().skip(1) {
                    s.0 = lerp(&x0, &s.0, 0.5);
                    s.1 = f(&s.0);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    simplex.swap_remove(0)
}

fn random_start(domain: &Domain, rng: &mut ChaCha8Rng) -> Point {
    match domain {
        Domain::Box(ivs) => ivs
            .iter()
            .map(|iv| match (iv.lo.is_finite(), iv.hi.is_finite()) {
                (true, true) => iv.lo + (iv.hi - iv.lo) * rng.gen_range(0.02..0.98),
                (true, false) => iv.lo + 10f64.powf(rng.gen_range(-2.0..1.0)),
                (false, true) => iv.hi - 10f64.powf(rng.gen_range(-2.0..1.0)),
                (false, false) => rng.gen_range(-5.0..5.0),
            })
            .collect(),
        Domain::Points { .. } => Vec::new(),
    }
}

/// Multistart local descent over `domain`, deterministic given `opts.seed`.
pub fn minimize_nd(obj: &dyn Fn(&[f64]) -> ExtReal, domain: &Domain, opts: &SolverOpts) -> Result<ProxResult> {
    let dim = domain.dim();
    if dim > MAX_DIM {
        return Err(Error::Unsupported(format!("dimension {dim} exceeds {MAX_DIM}")));
    }
    if opts.n_starts == 0 {
        return Err(Error::InvalidArgument("zero starts".into()));
    }
    if let Domain::Points { points, .. } = domain {
        return Ok(minimize_points(obj, points, opts));
    }
    let f = |x: &[f64]| -> f64 {
        if domain.contains(x) {
            obj(x).to_f64()
        } else {
            f64::INFINITY
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut starts: Vec<Point> = domain.representative_interior_point().into_iter().collect();
    while starts.len() < opts.n_starts {
        starts.push(random_start(domain, &mut rng));
    }
    let mut feasible: Vec<(Point, f64)> = starts
        .into_iter()
        .map(|s| {
            let v = f(&s);
            (s, v)
        })
        .filter(|(_, v)| v.is_finite() || *v == f64::NEG_INFINITY)
        .collect();
    if feasible.is_empty() {
        feasible = domain
            .interior_samples(7)
            .into_iter()
            .map(|s| {
                let v = f(&s);
                (s, v)
            })
            .filter(|(_, v)| v.is_finite())
            .take(opts.n_starts)
            .collect();
    }
    if feasible.is_empty() {
        return Ok(ProxResult::all_infinite());
    }

    let mut found: Vec<(Point, f64)> = Vec::new();
    for (s, v) in feasible {
        if v < -opts.escape {
            return Ok(ProxResult::unbounded(format!("objective {v:e} at start {s:?}")));
        }
        let (mut x, mut fx) = nelder_mead(&f, &s, 0.1, opts.tol_nd, opts.escape);
        for _ in 0..3 {
            let (y, fy) = nelder_mead(&f, &x, 1e-3, opts.tol_nd * 1e-2, opts.escape);
            let done = fy >= fx - 1e-15 * (1.0 + fx.abs());
            if fy <= fx {
                x = y;
                fx = fy;
            }
            if done {
                break;
            }
        }
        if fx < -opts.escape {
            return Ok(ProxResult::unbounded(format!("objective {fx:e} < -{:e} at {x:?}", opts.escape)));
        }
        found.push((x, fx));
    }

    let best = found.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
    let mut minimizers: Vec<Point> = Vec::new();
    for (x, v) in found.iter().filter(|c| c.1 <= best + opts.cluster_tol) {
        let _ = v;
        if !minimizers.iter().any(|m| sup_dist(m, x) <= opts.cluster_tol.sqrt() * (1.0 + norm_inf(m))) {
            minimizers.push(x.clone());
        }
    }
    minimizers.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));

    // a minimizer glued to an open face, or drifting away, means the
    // infimum is only approached
    let escaping = minimizers.iter().any(|m| near_open_face(domain, m) || norm_inf(m) > 1e7);
    if escaping {
        return Ok(ProxResult {
            inf_value: ExtReal::from_eval(best),
            minimizers: Vec::new(),
            status: ProxStatus::EmptyInfNotAttained,
            certificate: format!("descent approached {:?}", minimizers[0]),
        });
    }
    Ok(ProxResult {
        inf_value: ExtReal::from_eval(best),
        minimizers,
        status: ProxStatus::Nonempty,
        certificate: format!("{} start(s)", found.len()),
    })
}

fn near_open_face(domain: &Domain, x: &[f64]) -> bool {
    match domain {
        Domain::Box(ivs) => ivs.iter().zip(x).any(|(iv, &t)| {
            (iv.lo.is_finite() && !iv.lo_closed && t - iv.lo < 1e-7 * (1.0 + iv.lo.abs()))
                || (iv.hi.is_finite() && !iv.hi_closed && iv.hi - t < 1e-7 * (1.0 + iv.hi.abs()))
        }),
        Domain::Points { .. } => false,
    }
}

fn sup_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn minimize_points(obj: &dyn Fn(&[f64]) -> ExtReal, points: &[Point], opts: &SolverOpts) -> ProxResult {
    let vals: Vec<ExtReal> = points.iter().map(|p| obj(p)).collect();
    let best = vals.iter().copied().min().unwrap_or(ExtReal::POS_INF);
    if best.is_pos_inf() {
        return ProxResult::all_infinite();
    }
    if best.is_neg_inf() {
        return ProxResult::unbounded("objective is -inf at a listed point".into());
    }
    let b = best.to_f64();
    let minimizers = points
        .iter()
        .zip(&vals)
        .filter(|(_, v)| v.to_f64() <= b + opts.cluster_tol)
        .map(|(p, _)| p.clone())
        .collect();
    ProxResult {
        inf_value: best,
        minimizers,
        status: ProxStatus::Nonempty,
        certificate: format!("exhaustive over {} point(s)", points.len()),
    }
}

/// Minimizes over any domain: exhaustive on finite sets, the scalar solver on
/// intervals, multistart descent otherwise.
pub fn minimize_over(obj: &dyn Fn(&[f64]) -> ExtReal, domain: &Domain, opts: &SolverOpts) -> Result<ProxResult> {
    match domain {
        Domain::Points { points, .. } => Ok(minimize_points(obj, points, opts)),
        Domain::Box(ivs) if ivs.len() == 1 => {
            let iv: Interval = ivs[0];
            if !iv.is_solid() {
                if iv.lo == iv.hi && iv.contains(iv.lo) {
                    return Ok(minimize_points(obj, &[vec![iv.lo]], opts));
                }
                return Ok(ProxResult::all_infinite());
            }
            minimize_scalar(&|t| obj(&[t]), iv, opts)
        }
        Domain::Box(ivs) => {
            if ivs.iter().any(|iv| !iv.is_solid()) {
                return Ok(ProxResult::all_infinite());
            }
            minimize_nd(obj, domain, opts)
        }
    }
}
