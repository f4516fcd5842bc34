//! Certifiers for smoothness relative to a kernel and the inequalities that
//! characterize it: B-cocoercivity, its extended form over the subgradient
//! graph, and a*-strong convexity of the conjugate.
//!
//! All verdicts are over finite sample sets.

use crate::bregman::conj_distance;
use crate::error::{Error, Result};
use crate::kernels::{dragomir_y, make_kernel, Kernel};
use crate::numerics::{dot, finite_diff_grad, sub, Domain, ExtReal, ObjectiveFn, Point, Side};

/// Tolerance for closed-form instances.
pub const TOL_EXACT: f64 = 1e-7;
/// Tolerance when finite differences participate.
pub const TOL_FD: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SmoothVerdict {
    Consistent,
    Violated,
}

#[derive(Clone, Debug)]
pub struct SmoothnessReport {
    pub checked_pairs: usize,
    /// `max(0, −residual)` over the samples.
    pub max_violation: f64,
    pub verdict: SmoothVerdict,
    /// Up to five worst samples with their residuals.
    pub witnesses: Vec<(Vec<Point>, f64)>,
    pub note: String,
}

impl SmoothnessReport {
    pub fn consistent(&self) -> bool {
        self.verdict == SmoothVerdict::Consistent
    }
}

struct Collector {
    tol: f64,
    n: usize,
    worst: f64,
    witnesses: Vec<(Vec<Point>, f64)>,
}

impl Collector {
    fn new(tol: f64) -> Self {
        Collector { tol, n: 0, worst: 0.0, witnesses: Vec::new() }
    }

    fn push(&mut self, pts: Vec<Point>, residual: f64) {
        self.n += 1;
        let v = if residual.is_nan() { f64::INFINITY } else { (-residual).max(0.0) };
        self.worst = self.worst.max(v);
        if v > self.tol {
            self.witnesses.push((pts, residual));
            self.witnesses.sort_by(|a, b| a.1.total_cmp(&b.1));
            self.witnesses.truncate(5);
        }
    }

    fn finish(self, note: impl Into<String>) -> SmoothnessReport {
        SmoothnessReport {
            checked_pairs: self.n,
            max_violation: self.worst,
            verdict: if self.worst > self.tol { SmoothVerdict::Violated } else { SmoothVerdict::Consistent },
            witnesses: self.witnesses,
            note: note.into(),
        }
    }
}

fn require_interior(k: &Kernel, pts: &[Point]) -> Result<()> {
    match pts.iter().find(|p| !k.domain.contains_interior(p)) {
        Some(p) => Err(Error::OutsideDomain(p.clone())),
        None => Ok(()),
    }
}

/// Analytic gradient, or central differences when none is attached.
pub fn gradient(f: &ObjectiveFn, x: &[f64]) -> Result<Point> {
    match f.grad(x) {
        Some(g) => Ok(g),
        None => {
            let h = 1e-6 * (1.0 + x.iter().fold(0.0f64, |m, t| m.max(t.abs())));
            finite_diff_grad(f, x, h)
        }
    }
}

fn bregman_of(f: &ObjectiveFn, x: &[f64], y: &[f64]) -> Result<f64> {
    let g = gradient(f, y)?;
    Ok(f.eval(x).to_f64() - f.eval(y).to_f64() - dot(&g, &sub(x, y)))
}

fn kernel_bregman(k: &Kernel, x: &[f64], y: &[f64]) -> f64 {
    crate::bregman::distance(k, x, y).to_f64()
}

/// `κ − f` convex on the samples: `D_f ≤ D_κ` on ordered pairs and midpoint
/// convexity on unordered ones.
pub fn rel_smooth_check(k: &Kernel, f: &ObjectiveFn, samples: &[Point], tol: f64) -> Result<SmoothnessReport> {
    require_interior(k, samples)?;
    let h = |x: &[f64]| k.value(x).to_f64() - f.eval(x).to_f64();
    let mut c = Collector::new(tol);
    for (a, x) in samples.iter().enumerate() {
        for (b, y) in samples.iter().enumerate() {
            if a == b {
                continue;
            }
            c.push(vec![x.clone(), y.clone()], kernel_bregman(k, x, y) - bregman_of(f, x, y)?);
            if a < b {
                let m: Point = x.iter().zip(y).map(|(p, q)| 0.5 * (p + q)).collect();
                c.push(vec![x.clone(), y.clone()], 0.5 * h(x) + 0.5 * h(y) - h(&m));
            }
        }
    }
    Ok(c.finish("D-form and midpoint convexity of kappa - f"))
}

fn require_cocoercive_kernel(k: &Kernel) -> Result<()> {
    if !k.flags.legendre {
        return Err(Error::KernelProperty { kernel: k.to_string(), property: "legendre" });
    }
    if !k.flags.one_coercive {
        return Err(Error::KernelProperty { kernel: k.to_string(), property: "one_coercive" });
    }
    Ok(())
}

/// Extended residual
/// `f(x̄) − f(x) − ⟨ξ, x̄ − x⟩ − D_{κ*}(∇κ(x̄) − (∇f(x̄) − ξ), ∇κ(x̄))`.
fn ext_residual(k: &Kernel, f: &ObjectiveFn, x_bar: &[f64], x: &[f64], xi: &[f64]) -> Result<f64> {
    let gk = k.grad(x_bar).ok_or_else(|| Error::OutsideDomain(x_bar.to_vec()))?;
    let gf = gradient(f, x_bar)?;
    let a: Point = gk.iter().zip(&gf).zip(xi).map(|((p, q), s)| p - (q - s)).collect();
    let lhs = f.eval(x_bar).to_f64() - f.eval(x).to_f64() - dot(xi, &sub(x_bar, x));
    Ok(lhs - conj_distance(k, &a, &gk).to_f64())
}

/// `D_f(x̄, x) ≥ D_{κ*}(∇κ(x̄) − (∇f(x̄) − ∇f(x)), ∇κ(x̄))` on ordered pairs.
pub fn bcoco_check(k: &Kernel, f: &ObjectiveFn, pairs: &[(Point, Point)], tol: f64) -> Result<SmoothnessReport> {
    require_cocoercive_kernel(k)?;
    let mut c = Collector::new(tol);
    for (x_bar, x) in pairs {
        require_interior(k, &[x_bar.clone(), x.clone()])?;
        let xi = gradient(f, x)?;
        c.push(vec![x_bar.clone(), x.clone()], ext_residual(k, f, x_bar, x, &xi)?);
    }
    Ok(c.finish("interior pairs"))
}

/// Extended inequality over `x̄` in the samples and `(x, ξ)` in the supplied
/// subgradient graph; the note reports how many graph points are on `∂X`.
pub fn ext_bcoco_check(
    k: &Kernel,
    f: &ObjectiveFn,
    samples: &[Point],
    graph: &[(Point, Point)],
    tol: f64,
) -> Result<SmoothnessReport> {
    require_cocoercive_kernel(k)?;
    require_interior(k, samples)?;
    let mut c = Collector::new(tol);
    let mut boundary = 0;
    for (x, xi) in graph {
        if !k.domain.contains(x) {
            return Err(Error::OutsideDomain(x.clone()));
        }
        boundary += !k.domain.contains_interior(x) as usize;
        for x_bar in samples {
            c.push(vec![x_bar.clone(), x.clone(), xi.clone()], ext_residual(k, f, x_bar, x, xi)?);
        }
    }
    Ok(c.finish(format!("{} graph point(s), {boundary} on the boundary of X", graph.len())))
}

/// `f̃*(ξ) − f̃*(ξ̄) − κ*(ξ − ξ̄ + ∇κ(x̄)) + κ*(∇κ(x̄)) ≥ 0` over triples
/// `(ξ, ξ̄, x̄)` with `x̄ ∈ ∂f̃*(ξ̄) ∩ int X` certified by the caller.
pub fn astar_check(k: &Kernel, fstar: &ObjectiveFn, triples: &[(Point, Point, Point)], tol: f64) -> Result<SmoothnessReport> {
    let mut c = Collector::new(tol);
    for (xi, xi_bar, x_bar) in triples {
        let g = k.grad(x_bar).ok_or_else(|| Error::OutsideDomain(x_bar.clone()))?;
        let fb = fstar.eval(xi_bar);
        if !fb.is_finite() {
            return Err(Error::Hypothesis(format!("conjugate infinite at the base point {xi_bar:?}")));
        }
        let shifted: Point = xi.iter().zip(xi_bar).zip(&g).map(|((a, b), s)| a - b + s).collect();
        let r = fstar
            .eval(xi)
            .add_real(-fb.to_f64())
            .checked_sub(k.conj_value(&shifted))
            .map(|v| v.add_real(k.conj_value(&g).to_f64()))
            .unwrap_or(ExtReal::POS_INF);
        // +∞ − (+∞) cannot occur: a finite right-hand side is required for a violation
        c.push(vec![xi.clone(), xi_bar.clone(), x_bar.clone()], r.to_f64());
    }
    Ok(c.finish("conjugate-side inequality"))
}

/// Looks for two distinct points of `dom f` whose midpoint gap
/// `½f(a) + ½f(b) − f((a+b)/2)` vanishes — a witness against strict convexity.
pub fn strict_convexity_probe(f: &ObjectiveFn, points: &[Point], tol: f64) -> Option<(Point, Point)> {
    for (i, a) in points.iter().enumerate() {
        let Some(fa) = f.eval(a).finite() else { continue };
        for b in &points[i + 1..] {
            let Some(fb) = f.eval(b).finite() else { continue };
            let m: Point = a.iter().zip(b).map(|(p, q)| 0.5 * (p + q)).collect();
            if let Some(fm) = f.eval(&m).finite() {
                if (0.5 * fa + 0.5 * fb - fm).abs() <= tol && a != b {
                    return Some((a.clone(), b.clone()));
                }
            }
        }
    }
    None
}

/// A catalog instance with everything the equivalence suite needs.
#[derive(Clone, Debug)]
pub struct Instance {
    pub name: &'static str,
    pub kernel: Kernel,
    pub f: ObjectiveFn,
    pub fstar: ObjectiveFn,
    pub samples: Vec<Point>,
    pub pairs: Vec<(Point, Point)>,
    /// `(x, ξ)` with `ξ ∈ ∂f̃(x)`.
    pub graph: Vec<(Point, Point)>,
    /// `(ξ, ξ̄, x̄)` with `x̄ ∈ ∂f̃*(ξ̄) ∩ int X`.
    pub triples: Vec<(Point, Point, Point)>,
    pub tol: f64,
}

#[derive(Clone, Debug)]
pub struct EquivalenceReport {
    pub instance: &'static str,
    pub rel_smooth: SmoothnessReport,
    pub bcoco: SmoothnessReport,
    pub ext_bcoco: SmoothnessReport,
    pub astar: SmoothnessReport,
    /// Smoothness, extended cocoercivity and a*-strong convexity agree, and
    /// smoothness implies cocoercivity.
    pub agree: bool,
}

pub fn equivalence_suite(inst: &Instance) -> Result<EquivalenceReport> {
    let rel = rel_smooth_check(&inst.kernel, &inst.f, &inst.samples, inst.tol)?;
    let bcoco = bcoco_check(&inst.kernel, &inst.f, &inst.pairs, inst.tol)?;
    let ext = ext_bcoco_check(&inst.kernel, &inst.f, &inst.samples, &inst.graph, inst.tol)?;
    let astar = astar_check(&inst.kernel, &inst.fstar, &inst.triples, inst.tol)?;
    let agree = rel.verdict == ext.verdict && ext.verdict == astar.verdict && (!rel.consistent() || bcoco.consistent());
    Ok(EquivalenceReport { instance: inst.name, rel_smooth: rel, bcoco, ext_bcoco: ext, astar, agree })
}

pub mod catalog {
    use super::*;
    use crate::functions::make_function;

    fn pairs_of(samples: &[Point]) -> Vec<(Point, Point)> {
        let mut out = Vec::new();
        for a in samples {
            for b in samples {
                if a != b {
                    out.push((a.clone(), b.clone()));
                }
            }
        }
        out
    }

    /// `D = {ξ : ξ₁² + ξ₂ ≤ 0}`.
    pub fn in_parabola_region(xi: &[f64]) -> bool {
        xi[0] * xi[0] + xi[1] <= 0.0
    }

    /// `ξ` lattice: 21×21 over `[−3, 3] × [−9, 0]`, restricted to `D`.
    pub fn parabola_lattice() -> Vec<Point> {
        let mut out = Vec::new();
        for i in 0..21 {
            for j in 0..21 {
                let xi = vec![-3.0 + 0.3 * i as f64, -9.0 + 0.45 * j as f64];
                if in_parabola_region(&xi) {
                    out.push(xi);
                }
            }
        }
        out
    }

    /// Boundary points `ξ̄ = (u, −u²)` with subgradient `x̄ = t(2u, 1)`.
    pub fn parabola_anchors() -> Vec<(Point, Point, f64)> {
        let mut out = Vec::new();
        for u in [-2.0, -1.0, 0.0, 1.0, 2.0] {
            for t in [0.1, 0.5, 1.0, 2.0, 10.0] {
                out.push((vec![u, -u * u], vec![2.0 * u * t, t], t));
            }
        }
        out
    }

    /// `f(x) = x₁²/(4x₂)` relative to the two-dimensional kernel; its
    /// conjugate is the indicator of `D`.
    pub fn dragomir() -> Instance {
        let k = make_kernel("dragomir2d", &[]).expect("catalog kernel");
        let f = make_function("dragomir_f", &[], &k, Side::Left).expect("catalog function");
        let fstar = ObjectiveFn::new("indicator of D", Domain::real_space(2), Side::Left, |xi| {
            if in_parabola_region(xi) {
                0.0
            } else {
                f64::INFINITY
            }
        });
        let mut samples = Vec::new();
        for a in [-2.0, -0.5, 0.0, 1.0, 3.0] {
            for b in [0.1, 0.5, 1.0, 2.0, 5.0] {
                samples.push(vec![a, b]);
            }
        }
        let graph = samples.iter().map(|x| (x.clone(), f.grad(x).expect("interior"))).collect();
        let lattice = parabola_lattice();
        let triples = parabola_anchors()
            .into_iter()
            .flat_map(|(xb, x, _)| lattice.iter().map(move |xi| (xi.clone(), xb.clone(), x.clone())))
            .collect();
        Instance { name: "dragomir", kernel: k, f, fstar, pairs: pairs_of(&samples), samples, graph, triples, tol: TOL_EXACT }
    }

    /// `f = (c/2)‖·‖²` on the plane relative to `½‖·‖²`; 1-smooth iff `c ≤ 1`.
    pub fn euclidean_quadratic(c: f64) -> Instance {
        let k = make_kernel("euclidean", &[2.0]).expect("catalog kernel");
        let f = ObjectiveFn::new(format!("{c}/2 |x|^2"), Domain::real_space(2), Side::Left, move |x| 0.5 * c * dot(x, x))
            .with_grad(move |x| x.iter().map(|t| c * t).collect());
        let fstar = ObjectiveFn::new(format!("|xi|^2/(2*{c})"), Domain::real_space(2), Side::Left, move |xi| 0.5 * dot(xi, xi) / c);
        let samples: Vec<Point> = [[-1.0, 0.5], [0.0, 0.0], [0.7, -0.3], [2.0, 1.0], [-0.4, -1.5]].iter().map(|p| p.to_vec()).collect();
        let graph = samples.iter().map(|x| (x.clone(), x.iter().map(|t| c * t).collect())).collect();
        let mut triples = Vec::new();
        for xb in &samples {
            for xi in &samples {
                triples.push((xi.clone(), xb.clone(), xb.iter().map(|t| t / c).collect()));
            }
        }
        let name = if c == 1.0 { "euclidean_half_sq" } else { "euclidean_sq" };
        Instance { name, kernel: k, f, fstar, pairs: pairs_of(&samples), samples, graph, triples, tol: TOL_EXACT }
    }

    /// `f(x) = ⟨a, x⟩` on the plane; `f̃*` is the indicator of `{a}`.
    pub fn euclidean_linear() -> Instance {
        let a = vec![0.5, -1.0];
        let k = make_kernel("euclidean", &[2.0]).expect("catalog kernel");
        let f = make_function("linear", &a, &k, Side::Left).expect("catalog function");
        let fstar = make_function("indicator", &a, &k, Side::Left).expect("catalog function");
        let samples: Vec<Point> = [[-1.0, 0.5], [0.0, 0.0], [0.7, -0.3], [2.0, 1.0]].iter().map(|p| p.to_vec()).collect();
        let graph = samples.iter().map(|x| (x.clone(), a.clone())).collect();
        let mut triples = Vec::new();
        for xb in &samples {
            for xi in samples.iter().chain(std::iter::once(&a)) {
                triples.push((xi.clone(), a.clone(), xb.clone()));
            }
        }
        Instance { name: "euclidean_linear", kernel: k, f, fstar, pairs: pairs_of(&samples), samples, graph, triples, tol: TOL_EXACT }
    }

    pub fn all() -> Vec<Instance> {
        vec![dragomir(), euclidean_quadratic(1.0), euclidean_quadratic(2.0), euclidean_linear()]
    }

    /// `Y(ξ₁, ξ₂ + t − 1/t) ≤ t` on the lattice, for every anchor.
    pub fn y_monotonicity() -> bool {
        parabola_anchors().iter().all(|(_, _, t)| {
            parabola_lattice().iter().all(|xi| dragomir_y(&[xi[0], xi[1] + t - 1.0 / t]) <= t * (1.0 + 1e-12))
        })
    }
}
