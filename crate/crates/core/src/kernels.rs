//! Distance-generating functions with closed-form values, gradients and
//! conjugates, plus empirical certification of their structural flags.

use std::fmt;

use crate::error::{Error, Result};
use crate::numerics::domain::cartesian;
use crate::numerics::{dist_inf, Domain, ExtReal, Interval, Point};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KernelKind {
    /// `½‖x‖²` on ℝⁿ.
    Euclidean(usize),
    /// `−ln x` on `(0, ∞)`.
    Burg,
    /// `eˣ` on ℝ.
    Exp,
    /// `½x²` restricted to `[−1, 1]`.
    BoxedQuadratic,
    /// `x² − 2x + 3` for `x < 1`, `x + 1/x` for `x ≥ 1`.
    PiecewiseEnvStar,
    /// `x₁²/(4x₂) + ½x₂² − ln x₂` on `ℝ × (0, ∞)`.
    Dragomir2d,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KernelFlags {
    pub legendre: bool,
    pub one_coercive: bool,
    pub full_domain: bool,
    pub essentially_smooth: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Kernel {
    pub kind: KernelKind,
    pub domain: Domain,
    pub conj_domain: Domain,
    pub flags: KernelFlags,
}

pub const CATALOG: [&str; 6] = ["euclidean", "burg", "exp", "boxed_quadratic", "piecewise_env_star", "dragomir2d"];

const POS: f64 = f64::INFINITY;

fn half_line() -> Interval {
    Interval::open(0.0, POS)
}

/// `Y(ξ)` of the two-dimensional kernel, the positive root of `Y² − sY − 1`
/// with `s = ξ₁² + ξ₂`, computed without cancellation.
pub fn dragomir_y(xi: &[f64]) -> f64 {
    let s = xi[0] * xi[0] + xi[1];
    let r = (s * s + 4.0).sqrt();
    if !r.is_finite() {
        // |s| beyond ~1e154: Y ≈ s or ≈ −1/s
        return if s > 0.0 { s } else { -1.0 / s };
    }
    if s >= 0.0 {
        0.5 * (s + r)
    } else {
        2.0 / (r - s)
    }
}

pub fn make_kernel(name: &str, params: &[f64]) -> Result<Kernel> {
    let kind = match name {
        "euclidean" => {
            let dim = params.first().copied().unwrap_or(1.0);
            if !(dim >= 1.0 && dim.fract() == 0.0 && dim <= 4.0) {
                return Err(Error::InvalidArgument(format!("euclidean dimension {dim} not in 1..=4")));
            }
            KernelKind::Euclidean(dim as usize)
        }
        "burg" => KernelKind::Burg,
        "exp" => KernelKind::Exp,
        "boxed_quadratic" => KernelKind::BoxedQuadratic,
        "piecewise_env_star" => KernelKind::PiecewiseEnvStar,
        "dragomir2d" => KernelKind::Dragomir2d,
        other => return Err(Error::UnknownKernel(other.to_string())),
    };
    Ok(Kernel::new(kind))
}

/// Parses `name[:p1,p2,...]`.
pub fn parse_kernel(spec: &str) -> Result<Kernel> {
    let (name, params) = crate::functions::split_spec(spec)?;
    make_kernel(name, &params)
}

impl Kernel {
    pub fn new(kind: KernelKind) -> Self {
        let flags = |legendre, one_coercive, full_domain, essentially_smooth| KernelFlags {
            legendre,
            one_coercive,
            full_domain,
            essentially_smooth,
        };
        let (domain, conj_domain, flags) = match kind {
            KernelKind::Euclidean(n) => (Domain::real_space(n), Domain::real_space(n), flags(true, true, true, true)),
            KernelKind::Burg => (
                Domain::interval(half_line()),
                Domain::interval(Interval::open(f64::NEG_INFINITY, 0.0)),
                flags(true, false, false, true),
            ),
            KernelKind::Exp => (
                Domain::real_space(1),
                Domain::interval(Interval::new(0.0, POS, true, false)),
                flags(true, false, true, true),
            ),
            KernelKind::BoxedQuadratic => (
                Domain::interval(Interval::closed(-1.0, 1.0)),
                Domain::real_space(1),
                flags(false, true, false, false),
            ),
            KernelKind::PiecewiseEnvStar => (
                Domain::real_space(1),
                Domain::interval(Interval::new(f64::NEG_INFINITY, 1.0, false, true)),
                flags(true, false, true, true),
            ),
            KernelKind::Dragomir2d => (
                Domain::Box(vec![Interval::real_line(), half_line()]),
                Domain::real_space(2),
                flags(true, true, false, true),
            ),
        };
        Kernel { kind, domain, conj_domain, flags }
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            KernelKind::Euclidean(_) => "euclidean",
            KernelKind::Burg => "burg",
            KernelKind::Exp => "exp",
            KernelKind::BoxedQuadratic => "boxed_quadratic",
            KernelKind::PiecewiseEnvStar => "piecewise_env_star",
            KernelKind::Dragomir2d => "dragomir2d",
        }
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    /// `κ(x)`, `+∞` off `X`.
    pub fn value(&self, x: &[f64]) -> ExtReal {
        if !self.domain.contains(x) {
            return ExtReal::POS_INF;
        }
        let v = match self.kind {
            KernelKind::Euclidean(_) => 0.5 * x.iter().map(|t| t * t).sum::<f64>(),
            KernelKind::Burg => -x[0].ln(),
            KernelKind::Exp => x[0].exp(),
            KernelKind::BoxedQuadratic => 0.5 * x[0] * x[0],
            KernelKind::PiecewiseEnvStar => {
                let t = x[0];
                if t < 1.0 {
                    t * t - 2.0 * t + 3.0
                } else {
                    t + 1.0 / t
                }
            }
            KernelKind::Dragomir2d => x[0] * x[0] / (4.0 * x[1]) + 0.5 * x[1] * x[1] - x[1].ln(),
        };
        ExtReal::from_eval(v)
    }

    /// `∇κ(y)` for `y ∈ int X`.
    pub fn grad(&self, y: &[f64]) -> Option<Point> {
        if !self.domain.contains_interior(y) {
            return None;
        }
        Some(match self.kind {
            KernelKind::Euclidean(_) => y.to_vec(),
            KernelKind::Burg => vec![-1.0 / y[0]],
            KernelKind::Exp => vec![y[0].exp()],
            KernelKind::BoxedQuadratic => vec![y[0]],
            KernelKind::PiecewiseEnvStar => {
                let t = y[0];
                vec![if t < 1.0 { 2.0 * t - 2.0 } else { 1.0 - 1.0 / (t * t) }]
            }
            KernelKind::Dragomir2d => {
                let (a, b) = (y[0], y[1]);
                vec![a / (2.0 * b), -a * a / (4.0 * b * b) + b - 1.0 / b]
            }
        })
    }

    /// Closed-form `D(x, y)` for `x ∈ X`, `y ∈ int X` where the generic
    /// formula cancels badly; `None` means use the generic one.
    pub fn stable_distance(&self, x: &[f64], y: &[f64]) -> Option<f64> {
        match self.kind {
            KernelKind::Euclidean(_) => Some(0.5 * x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>()),
            KernelKind::BoxedQuadratic => Some(0.5 * (x[0] - y[0]) * (x[0] - y[0])),
            KernelKind::Burg => {
                let d = x[0] / y[0] - 1.0;
                Some(d - d.ln_1p())
            }
            KernelKind::Exp => {
                let d = x[0] - y[0];
                Some(y[0].exp() * (d.exp_m1() - d))
            }
            KernelKind::PiecewiseEnvStar => {
                let (a, b) = (x[0], y[0]);
                let d = a - b;
                match (a < 1.0, b < 1.0) {
                    (true, true) => Some(d * d),
                    (false, false) => Some(d * d / (a * b * b)),
                    _ => None,
                }
            }
            KernelKind::Dragomir2d => None,
        }
    }

    /// `κ*(ξ)`.
    pub fn conj_value(&self, xi: &[f64]) -> ExtReal {
        if !self.conj_domain.contains(xi) {
            return ExtReal::POS_INF;
        }
        let v = match self.kind {
            KernelKind::Euclidean(_) => 0.5 * xi.iter().map(|t| t * t).sum::<f64>(),
            KernelKind::Burg => -1.0 - (-xi[0]).ln(),
            KernelKind::Exp => {
                let s = xi[0];
                if s == 0.0 {
                    0.0
                } else {
                    s * s.ln() - s
                }
            }
            KernelKind::BoxedQuadratic => {
                let s = xi[0];
                if s.abs() <= 1.0 {
                    0.5 * s * s
                } else {
                    s.abs() - 0.5
                }
            }
            KernelKind::PiecewiseEnvStar => {
                let s = xi[0];
                if s < 0.0 {
                    let h = 0.5 * (s + 2.0);
                    h * h - 3.0
                } else {
                    -2.0 * (1.0 - s).sqrt()
                }
            }
            KernelKind::Dragomir2d => {
                let y = dragomir_y(xi);
                0.5 * y * y - 1.0 + y.ln()
            }
        };
        ExtReal::from_eval(v)
    }

    /// `∇κ*(ξ)` on `int dom κ*`.
    pub fn conj_grad(&self, xi: &[f64]) -> Option<Point> {
        if !self.conj_domain.contains_interior(xi) {
            return None;
        }
        Some(match self.kind {
            KernelKind::Euclidean(_) => xi.to_vec(),
            KernelKind::Burg => vec![-1.0 / xi[0]],
            KernelKind::Exp => vec![xi[0].ln()],
            KernelKind::BoxedQuadratic => vec![xi[0].clamp(-1.0, 1.0)],
            KernelKind::PiecewiseEnvStar => {
                let s = xi[0];
                vec![if s < 0.0 { 0.5 * (s + 2.0) } else { 1.0 / (1.0 - s).sqrt() }]
            }
            KernelKind::Dragomir2d => {
                let y = dragomir_y(xi);
                vec![2.0 * xi[0] * y, y]
            }
        })
    }

    /// Finite window per axis used to lay out grids over `int X`.
    pub fn grid_window(&self) -> Vec<Interval> {
        match self.kind {
            KernelKind::Euclidean(n) => vec![Interval::closed(-1e3, 1e3); n],
            KernelKind::Burg => vec![Interval::new(0.0, 1e8, false, true)],
            KernelKind::Exp => vec![Interval::closed(-60.0, 700.0)],
            KernelKind::BoxedQuadratic => vec![Interval::closed(-1.0, 1.0)],
            KernelKind::PiecewiseEnvStar => vec![Interval::closed(-1e3, 1e3)],
            KernelKind::Dragomir2d => vec![Interval::closed(-1e2, 1e2), Interval::new(0.0, 1e2, false, true)],
        }
    }
}

impl fmt::Display for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            KernelKind::Euclidean(n) if n > 1 => write!(f, "euclidean:{n}"),
            _ => f.write_str(self.name()),
        }
    }
}

/// Interior grid for one axis: uniform core, geometric tails towards the
/// window ends, geometric approach (down to `margin`) to finite open faces.
pub fn axis_grid(dom: Interval, window: Interval, n: usize, margin: f64) -> Vec<f64> {
    let lo = dom.lo.max(window.lo);
    let hi = dom.hi.min(window.hi);
    let core_lo = lo.max(-10.0);
    let core_hi = hi.min(10.0);
    let n_core = (n * 3 / 4).max(8);
    let n_tail = ((n - n_core.min(n)) / 4).max(4);
    let mut xs: Vec<f64> = (0..n_core).map(|i| core_lo + (core_hi - core_lo) * (i as f64 + 0.5) / n_core as f64).collect();
    let tail = |from: f64, to: f64, xs: &mut Vec<f64>| {
        // geometric in the distance from `from`
        let d = (to - from).abs();
        if d <= 1.0 {
            return;
        }
        for k in 1..=n_tail {
            let t = d.powf(k as f64 / n_tail as f64);
            xs.push(from + (to - from).signum() * t);
        }
    };
    tail(core_lo, lo, &mut xs);
    tail(core_hi, hi, &mut xs);
    let approach = |face: f64, inward: f64, xs: &mut Vec<f64>| {
        let mut d = 1e-2;
        while d >= margin * 0.999 {
            xs.push(face + inward * d);
            d /= 10.0;
        }
        xs.push(face + inward * margin);
    };
    if dom.lo.is_finite() && dom.lo >= window.lo {
        approach(dom.lo, 1.0, &mut xs);
    }
    if dom.hi.is_finite() && dom.hi <= window.hi {
        approach(dom.hi, -1.0, &mut xs);
    }
    xs.retain(|&x| dom.contains_interior(x) && x >= lo && x <= hi);
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    xs
}

/// Grid over `int X` (Cartesian product of axis grids).
pub fn interior_grid(k: &Kernel, per_axis: usize, margin: f64) -> Vec<Point> {
    let ivs = match &k.domain {
        Domain::Box(ivs) => ivs.clone(),
        Domain::Points { .. } => return Vec::new(),
    };
    let axes: Vec<Vec<f64>> = ivs.iter().zip(k.grid_window()).map(|(iv, w)| axis_grid(*iv, w, per_axis, margin)).collect();
    cartesian(&axes)
}

#[derive(Clone, Debug)]
pub struct CertEntry {
    pub property: &'static str,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug)]
pub struct KernelReport {
    pub kernel: String,
    pub entries: Vec<CertEntry>,
}

impl KernelReport {
    pub fn get(&self, property: &str) -> Option<&CertEntry> {
        self.entries.iter().find(|e| e.property == property)
    }

    /// Whether the empirical verdicts agree with the declared flags.
    pub fn consistent_with(&self, flags: &KernelFlags) -> bool {
        let check = |p: &str, want: bool| self.get(p).map(|e| e.pass == want).unwrap_or(true);
        check("convexity", true)
            && check("one_coercive", flags.one_coercive)
            && check("essentially_smooth", flags.essentially_smooth)
            && (!flags.legendre || check("gradient_inverse", true))
    }
}

fn ray_directions(dim: usize) -> Vec<Point> {
    let mut dirs = Vec::new();
    for i in 0..dim {
        for s in [1.0, -1.0] {
            let mut d = vec![0.0; dim];
            d[i] = s;
            dirs.push(d);
        }
    }
    if dim == 2 {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        for (a, b) in [(r, r), (r, -r), (-r, r), (-r, -r)] {
            dirs.push(vec![a, b]);
        }
    }
    dirs
}

/// Boundary points of `int X` approached by the essential-smoothness probe.
fn boundary_targets(k: &Kernel) -> Vec<(Point, Point)> {
    // (boundary point, inward unit direction)
    let mut out = Vec::new();
    if let Domain::Box(ivs) = &k.domain {
        let base = k.domain.representative_interior_point().unwrap_or_default();
        for (i, iv) in ivs.iter().enumerate() {
            for (face, inward) in [(iv.lo, 1.0), (iv.hi, -1.0)] {
                if !face.is_finite() {
                    continue;
                }
                for offset in [-1.0, 0.0, 1.0] {
                    let mut p = base.clone();
                    p[i] = face;
                    for (j, pj) in p.iter_mut().enumerate() {
                        if j != i && ivs[j].lo == f64::NEG_INFINITY && ivs[j].hi == POS {
                            *pj += offset;
                        }
                    }
                    let mut d = vec![0.0; ivs.len()];
                    d[i] = inward;
                    if !out.iter().any(|(q, _): &(Point, Point)| q == &p) {
                        out.push((p, d));
                    }
                }
            }
        }
    }
    out
}

/// Empirical certificate of the kernel's structural properties.
pub fn certify_kernel(k: &Kernel, probe_grid: &[Point], tol: f64) -> KernelReport {
    let mut entries = Vec::new();
    let in_x: Vec<&Point> = probe_grid.iter().filter(|p| k.domain.contains(p)).collect();

    // midpoint convexity
    let mut worst = 0.0f64;
    let mut witness = String::new();
    for (i, a) in in_x.iter().enumerate() {
        for b in in_x.iter().skip(i + 1) {
            let m: Point = a.iter().zip(b.iter()).map(|(x, y)| 0.5 * (x + y)).collect();
            let (va, vb, vm) = (k.value(a).to_f64(), k.value(b).to_f64(), k.value(&m).to_f64());
            let gap = vm - 0.5 * (va + vb);
            let scale = 1.0 + va.abs().max(vb.abs());
            if gap / scale > worst {
                worst = gap / scale;
                witness = format!("{a:?} {b:?}");
            }
        }
    }
    entries.push(CertEntry {
        property: "convexity",
        pass: worst <= tol,
        detail: if worst <= tol { format!("{} midpoint tests", in_x.len() * in_x.len().saturating_sub(1) / 2) } else { format!("gap {worst:e} at {witness}") },
    });

    // 1-coercivity: κ(x)/‖x‖ along rays up to R = 1e4
    let base = k.domain.representative_interior_point().unwrap_or_else(|| vec![0.0; k.dim()]);
    let mut one_co = true;
    let mut slow = String::new();
    for d in ray_directions(k.dim()) {
        let q = |r: f64| {
            let x: Point = base.iter().zip(&d).map(|(b, di)| b + r * di).collect();
            let nx = x.iter().map(|t| t * t).sum::<f64>().sqrt();
            k.value(&x).to_f64() / nx
        };
        let (q3, q4) = (q(1e3), q(1e4));
        let ok = q4 == f64::INFINITY || (q3 > 0.0 && q4 >= 9.5 * q3);
        if !ok {
            one_co = false;
            slow = format!("direction {d:?}: κ/‖x‖ = {q3:.4e} at 1e3, {q4:.4e} at 1e4");
        }
    }
    entries.push(CertEntry {
        property: "one_coercive",
        pass: one_co,
        detail: if one_co { "superlinear on every ray".into() } else { slow },
    });

    // essential smoothness: ‖∇κ‖ blows up towards ∂(int X)
    let mut ess = true;
    let mut bounded = String::new();
    for (p, d) in boundary_targets(k) {
        let mut last = 0.0;
        for j in 1..=12 {
            let t = 10f64.powi(-j);
            let x: Point = p.iter().zip(&d).map(|(a, b)| a + t * b).collect();
            if let Some(g) = k.grad(&x) {
                last = g.iter().map(|v| v * v).sum::<f64>().sqrt();
            }
        }
        if !(last >= 1e6) {
            ess = false;
            bounded = format!("‖∇κ‖ = {last:.4} approaching {p:?}");
        }
    }
    entries.push(CertEntry {
        property: "essentially_smooth",
        pass: ess,
        detail: if ess { "gradient norm diverges at every probed face".into() } else { bounded },
    });

    // ∇κ* ∘ ∇κ = id on interior samples
    let mut worst_inv = 0.0f64;
    for y in probe_grid.iter().filter(|p| k.domain.contains_interior(p)) {
        let back = k.grad(y).and_then(|g| k.conj_grad(&g));
        let err = match back {
            Some(b) => dist_inf(&b, y) / (1.0 + y.iter().fold(0.0f64, |m, t| m.max(t.abs()))),
            None => f64::INFINITY,
        };
        worst_inv = worst_inv.max(err);
    }
    entries.push(CertEntry {
        property: "gradient_inverse",
        pass: worst_inv <= tol,
        detail: format!("max relative error {worst_inv:.3e}"),
    });

    KernelReport { kernel: k.to_string(), entries }
}

/// Default probe set: interior grid points and, for closed domains, faces.
pub fn default_probes(k: &Kernel) -> Vec<Point> {
    let mut pts = interior_grid(k, 9, 1e-3);
    pts.retain(|p| p.iter().all(|t| t.abs() <= 50.0));
    if let Domain::Box(ivs) = &k.domain {
        if ivs.len() == 1 {
            let iv = ivs[0];
            if iv.lo_closed {
                pts.push(vec![iv.lo]);
            }
            if iv.hi_closed {
                pts.push(vec![iv.hi]);
            }
        }
    }
    pts
}

#[derive(Clone, Debug)]
pub struct GradRange {
    pub lo: Point,
    pub hi: Point,
    /// Every sampled gradient lies in `int dom κ*`.
    pub within_conj_interior: bool,
}

/// Empirical bounding box of `{∇κ(y)}` over interior samples.
pub fn kernel_grad_map_range(k: &Kernel, samples: &[Point]) -> GradRange {
    let n = k.dim();
    let mut lo = vec![f64::INFINITY; n];
    let mut hi = vec![f64::NEG_INFINITY; n];
    let mut within = true;
    for y in samples {
        if let Some(g) = k.grad(y) {
            for i in 0..n {
                lo[i] = lo[i].min(g[i]);
                hi[i] = hi[i].max(g[i]);
            }
            within &= k.conj_domain.contains_interior(&g);
        }
    }
    GradRange { lo, hi, within_conj_interior: within }
}

/// Samples reaching far into `int X` used for range estimates.
pub fn range_samples(k: &Kernel) -> Vec<Point> {
    interior_grid(k, 64, 1e-9)
}
