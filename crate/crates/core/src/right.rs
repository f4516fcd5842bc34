//! Right Bregman proximal map, envelope and hull, the epi-composition
//! `∇κ ▷ g`, and the right-side identities.

use crate::bregman::{check_lambda, distance};
use crate::error::{Error, Result};
use crate::kernels::{axis_grid, certify_kernel, default_probes, interior_grid, Kernel};
use crate::left::{
    bisect_threshold, change_dgf_hypotheses, classify, hull_grid_per_axis, left_env_sampled, max_jump, plus,
    refine_polyline, refine_sup, values_agree, ChangeDgfReport, HullOpts, ProxBoundReport,
};
use crate::numerics::{
    grid_biconjugate, minimize_over, numeric_conjugate, Domain, ExtReal, GridFn, Interval, ObjectiveFn, Point,
    ProxResult, Side, SolverOpts,
};
use crate::report::{hausdorff, Check, ProbeReport};
use crate::setvalued::{check_local_bounded, check_osc, SampledOperator, LB_RADII, OSC_TOL};

fn check_right(g: &ObjectiveFn, k: &Kernel) -> Result<()> {
    if g.side != Side::Right {
        return Err(Error::InvalidArgument(format!("`{}` is a left function", g.label)));
    }
    if g.dim() != k.dim() {
        return Err(Error::DimensionMismatch { expected: k.dim(), got: g.dim() });
    }
    Ok(())
}

fn check_anchor(k: &Kernel, x: &[f64]) -> Result<()> {
    if x.len() != k.dim() {
        return Err(Error::DimensionMismatch { expected: k.dim(), got: x.len() });
    }
    if x.iter().any(|t| t.is_nan()) {
        return Err(Error::NotANumber);
    }
    if !k.domain.contains(x) {
        return Err(Error::OutsideDomain(x.to_vec()));
    }
    Ok(())
}

/// `prox*_{λg}(x̄) = argmin_{y ∈ int X} g(y) + D(x̄, y)/λ` for `x̄ ∈ X`.
pub fn right_prox(k: &Kernel, g: &ObjectiveFn, lambda: f64, x_bar: &[f64], opts: &SolverOpts) -> Result<ProxResult> {
    check_lambda(lambda)?;
    check_right(g, k)?;
    check_anchor(k, x_bar)?;
    let dom = g.domain.intersect(&k.domain.interior())?;
    let obj = |y: &[f64]| plus(g.eval(y), distance(k, x_bar, y).scale(1.0 / lambda));
    minimize_over(&obj, &dom, opts)
}

pub fn right_env(k: &Kernel, g: &ObjectiveFn, lambda: f64, x_bar: &[f64], opts: &SolverOpts) -> Result<ExtReal> {
    Ok(right_prox(k, g, lambda, x_bar, opts)?.inf_value)
}

/// `min_j g_j + D(x, y_j)/λ` over a function sampled on `int X`.
pub fn right_env_sampled(k: &Kernel, g: &GridFn, lambda: f64, x: &[f64]) -> (ExtReal, Option<usize>) {
    let mut best = (ExtReal::POS_INF, None);
    for (j, (y, v)) in g.points.iter().zip(&g.values).enumerate() {
        let c = plus(*v, distance(k, x, y).scale(1.0 / lambda));
        if c < best.0 {
            best = (c, Some(j));
        }
    }
    best
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EpiMethod {
    /// `g(∇κ*(ξ))` on `int X*`.
    Legendre,
    /// Solve `∇κ(y) = ξ` on each monotone piece by bisection.
    Preimage,
}

/// `(∇κ ▷ g)(ξ) = inf { g(y) : y ∈ int X, ∇κ(y) = ξ }`.
#[derive(Clone, Debug)]
pub struct EpiComposition {
    pub kernel: Kernel,
    pub g: ObjectiveFn,
    pub method: EpiMethod,
    samples: Vec<f64>,
}

pub const PREIMAGE_TOL: f64 = 1e-10;

impl EpiComposition {
    /// Legendre kernels use the inverse gradient; other kernels must be 1-D.
    pub fn new(k: &Kernel, g: &ObjectiveFn) -> Result<Self> {
        let method = if k.flags.legendre { EpiMethod::Legendre } else { EpiMethod::Preimage };
        Self::with_method(k, g, method)
    }

    pub fn with_method(k: &Kernel, g: &ObjectiveFn, method: EpiMethod) -> Result<Self> {
        check_right(g, k)?;
        let samples = match method {
            EpiMethod::Legendre => Vec::new(),
            EpiMethod::Preimage => {
                if k.dim() != 1 {
                    return Err(Error::Unsupported(format!("preimage epi-composition for {k} in dimension {}", k.dim())));
                }
                interior_grid(k, 1024, 1e-9).into_iter().map(|p| p[0]).collect()
            }
        };
        Ok(EpiComposition { kernel: k.clone(), g: g.clone(), method, samples })
    }

    pub fn eval(&self, xi: &[f64]) -> Result<ExtReal> {
        if xi.len() != self.kernel.dim() {
            return Err(Error::DimensionMismatch { expected: self.kernel.dim(), got: xi.len() });
        }
        match self.method {
            EpiMethod::Legendre => {
                if !self.kernel.conj_domain.contains_interior(xi) {
                    return Ok(ExtReal::POS_INF);
                }
                Ok(match self.kernel.conj_grad(xi) {
                    Some(y) if self.kernel.domain.contains_interior(&y) => self.g.eval(&y),
                    _ => ExtReal::POS_INF,
                })
            }
            EpiMethod::Preimage => {
                let roots = self.preimage(xi[0])?;
                Ok(roots.iter().map(|&y| self.g.eval(&[y])).min().unwrap_or(ExtReal::POS_INF))
            }
        }
    }

    /// All sampled solutions of `κ'(y) = ξ` (one per sign change).
    pub fn preimage(&self, xi: f64) -> Result<Vec<f64>> {
        let k = &self.kernel;
        let s = |y: f64| k.grad(&[y]).map(|g| g[0] - xi);
        let mut roots = Vec::new();
        for w in self.samples.windows(2) {
            let (Some(sa), Some(sb)) = (s(w[0]), s(w[1])) else { continue };
            if sa == 0.0 {
                roots.push(w[0]);
                continue;
            }
            if sa.signum() == sb.signum() || sb == 0.0 {
                continue;
            }
            let (mut a, mut b, mut fa) = (w[0], w[1], sa);
            for _ in 0..200 {
                if b - a <= PREIMAGE_TOL * (1.0 + a.abs()) {
                    break;
                }
                let m = 0.5 * (a + b);
                let fm = s(m).ok_or_else(|| Error::ConstraintSolve(format!("gradient undefined at {m}")))?;
                if fm == 0.0 {
                    a = m;
                    b = m;
                    break;
                }
                if fm.signum() == fa.signum() {
                    a = m;
                    fa = fm;
                } else {
                    b = m;
                }
            }
            let y = 0.5 * (a + b);
            let r = s(y).map(f64::abs).unwrap_or(f64::INFINITY);
            if r > 1e-6 * (1.0 + xi.abs()) {
                return Err(Error::ConstraintSolve(format!("residual {r:e} solving grad {k}(y) = {xi} near y = {y}")));
            }
            roots.push(y);
        }
        if let Some(&last) = self.samples.last() {
            if s(last) == Some(0.0) {
                roots.push(last);
            }
        }
        Ok(roots)
    }
}

pub fn epi_composition(k: &Kernel, g: &ObjectiveFn, xi: &[f64]) -> Result<ExtReal> {
    EpiComposition::new(k, g)?.eval(xi)
}

#[derive(Clone, Debug, PartialEq)]
pub struct LscViolation {
    pub xi: Point,
    pub value: ExtReal,
    pub neighbourhood_min: f64,
}

#[derive(Clone, Debug)]
pub struct LscReport {
    pub violations: Vec<LscViolation>,
    /// Sufficient conditions for lsc of `∇κ ▷ g`.
    pub legendre_open_conj_domain: bool,
    pub g_coercive: bool,
    pub kernel_one_coercive: bool,
}

impl LscReport {
    pub fn lsc(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn any_sufficient(&self) -> bool {
        self.legendre_open_conj_domain || self.g_coercive || self.kernel_one_coercive
    }
}

pub const LSC_RADII: [f64; 3] = [1e-2, 1e-3, 1e-4];

fn is_open(d: &Domain) -> bool {
    match d {
        Domain::Box(ivs) => ivs.iter().all(|iv| (!iv.lo_closed || iv.lo.is_infinite()) && (!iv.hi_closed || iv.hi.is_infinite())),
        Domain::Points { points, .. } => points.is_empty(),
    }
}

/// Growth test for `g(y) → ∞` along every unbounded axis direction of its
/// domain: values at distances `1e2, 1e4, 1e6, 1e8` must increase by at
/// least 1 each time.
pub fn is_coercive(g: &ObjectiveFn) -> bool {
    let Domain::Box(ivs) = &g.domain else { return true };
    let Some(base) = g.domain.representative_interior_point() else { return true };
    for (i, iv) in ivs.iter().enumerate() {
        for (unbounded, s) in [(iv.hi == f64::INFINITY, 1.0), (iv.lo == f64::NEG_INFINITY, -1.0)] {
            if !unbounded {
                continue;
            }
            let vals: Vec<ExtReal> = [1e2, 1e4, 1e6, 1e8]
                .iter()
                .map(|t| {
                    let mut y = base.clone();
                    y[i] += s * t;
                    g.eval(&y)
                })
                .collect();
            let grows = vals.windows(2).all(|w| w[1].is_pos_inf() || (w[0].is_finite() && w[1].to_f64() >= w[0].to_f64() + 1.0));
            if !grows {
                return false;
            }
        }
    }
    true
}

/// Compares `(∇κ ▷ g)(ξ)` with its minimum over shrinking neighbourhoods.
/// A violation needs a gap above `tol` at the smallest radius that is not
/// shrinking with the radius.
pub fn epi_comp_lsc_check(k: &Kernel, g: &ObjectiveFn, grid: &[Point], tol: f64) -> Result<LscReport> {
    let epi = EpiComposition::new(k, g)?;
    let mut violations = Vec::new();
    for xi in grid {
        let v = epi.eval(xi)?;
        let mut mins = Vec::new();
        for r in LSC_RADII {
            let mut m = f64::INFINITY;
            for i in 0..xi.len() {
                for s in [1.0, -1.0] {
                    for t in [1.0, 0.5, 0.25, 0.1] {
                        let mut p = xi.clone();
                        p[i] += s * r * t;
                        if let Some(e) = epi.eval(&p)?.finite() {
                            m = m.min(e);
                        }
                    }
                }
            }
            mins.push(m);
        }
        let (m_big, m_mid, m_small) = (mins[0], mins[1], mins[2]);
        if !m_small.is_finite() {
            continue;
        }
        let violated = match v.finite() {
            Some(val) => {
                let (gap_mid, gap_small) = (val - m_mid, val - m_small);
                gap_small > tol && gap_small > 0.5 * gap_mid
            }
            // +∞ is lsc only if the neighbourhood minima blow up
            None if v.is_pos_inf() => m_small - m_mid <= 0.5 * (m_mid - m_big).abs(),
            None => false,
        };
        if violated {
            violations.push(LscViolation { xi: xi.clone(), value: v, neighbourhood_min: m_small });
        }
    }
    let cert = certify_kernel(k, &default_probes(k), 1e-6);
    Ok(LscReport {
        violations,
        legendre_open_conj_domain: k.flags.legendre && is_open(&k.conj_domain),
        g_coercive: is_coercive(g),
        kernel_one_coercive: cert.get("one_coercive").map_or(false, |c| c.pass),
    })
}

/// Probe points on `X*`: interior grid kept `1e-2` away from open faces
/// (closer points are below the resolution of the lsc radii), plus the
/// closed faces (1-D).
pub fn conj_probe_grid(k: &Kernel) -> Vec<Point> {
    match k.conj_domain.as_interval() {
        Some(iv) => {
            let mut pts: Vec<Point> = axis_grid(iv, Interval::closed(-1e3, 1e3), 33, 1e-2).into_iter().map(|t| vec![t]).collect();
            for (closed, t) in [(iv.lo_closed, iv.lo), (iv.hi_closed, iv.hi)] {
                if closed && t.is_finite() {
                    pts.push(vec![t]);
                }
            }
            pts
        }
        None => k.conj_domain.interior_samples(5),
    }
}

/// `κ* + λ(∇κ ▷ g)` on `X*`. Epi-composition failures count as `+∞`.
pub fn conj_side_function(k: &Kernel, g: &ObjectiveFn, lambda: f64) -> Result<ObjectiveFn> {
    let epi = EpiComposition::new(k, g)?;
    let kk = k.clone();
    Ok(ObjectiveFn::new(format!("kappa*+{lambda}*epi({})", g.label), k.conj_domain.clone(), Side::Left, move |xi| {
        match epi.eval(xi) {
            Ok(e) => plus(kk.conj_value(xi), e.scale(lambda)).to_f64(),
            Err(_) => f64::INFINITY,
        }
    }))
}

/// `λ·env*_{λg}(x̄) = κ(x̄) − (κ* + λ(∇κ ▷ g))*(x̄)`.
pub fn right_env_conjugate_form(
    k: &Kernel,
    g: &ObjectiveFn,
    lambda: f64,
    x_bar: &[f64],
    search: Option<&Domain>,
    opts: &SolverOpts,
) -> Result<ExtReal> {
    check_lambda(lambda)?;
    check_anchor(k, x_bar)?;
    let h = conj_side_function(k, g, lambda)?;
    let hc = numeric_conjugate(&h, x_bar, search, opts)?;
    k.value(x_bar).checked_sub(hc)
}

pub fn right_prox_bound_threshold(
    k: &Kernel,
    g: &ObjectiveFn,
    probe_x: &[f64],
    lambda_max: f64,
    opts: &SolverOpts,
) -> Result<ProxBoundReport> {
    check_right(g, k)?;
    check_anchor(k, probe_x)?;
    bisect_threshold(probe_x, lambda_max, &|l| Ok(classify(&right_prox(k, g, l, probe_x, opts)?)))
}

fn grad_set(k: &Kernel, pts: &[Point]) -> Vec<Point> {
    pts.iter().filter_map(|p| k.grad(p)).collect()
}

/// Verifies `∇κ(prox*_{λg}(x̄)) = ∇ψ(prox*^ψ_{λG}(x̄))` with
/// `G = [(∇κ ▷ g) + (κ* − ψ*)/λ]∘∇ψ`, and
/// `env*_{λg}(x̄) = env*^ψ_{λG}(x̄) + (κ − ψ)(x̄)/λ`.
pub fn change_dgf_right_check(
    k: &Kernel,
    psi: &Kernel,
    g: &ObjectiveFn,
    lambda: f64,
    x_bar: &[f64],
    tol: f64,
    opts: &SolverOpts,
) -> Result<ChangeDgfReport> {
    check_lambda(lambda)?;
    check_anchor(k, x_bar)?;
    change_dgf_hypotheses(k, psi)?;
    let epi = EpiComposition::new(k, g)?;
    let (kk, pp) = (k.clone(), psi.clone());
    let big_g = ObjectiveFn::new(
        format!("(epi({})+(kappa*-psi*)/lambda)@grad psi", g.label),
        psi.domain.interior(),
        Side::Right,
        move |z| {
            let Some(xi) = pp.grad(z) else { return f64::INFINITY };
            let e = epi.eval(&xi).unwrap_or(ExtReal::POS_INF);
            if e.is_pos_inf() {
                return f64::INFINITY;
            }
            let c = kk.conj_value(&xi).checked_sub(pp.conj_value(&xi)).unwrap_or(ExtReal::POS_INF);
            plus(e, c.scale(1.0 / lambda)).to_f64()
        },
    );
    let lhs = right_prox(k, g, lambda, x_bar, opts)?;
    let rhs = right_prox(psi, &big_g, lambda, x_bar, opts)?;
    let shift = k.value(x_bar).checked_sub(psi.value(x_bar))?.scale(1.0 / lambda);
    let env_rhs = rhs.inf_value.checked_add(shift)?;
    let lhs_set = grad_set(k, &lhs.minimizers);
    let rhs_set = grad_set(psi, &rhs.minimizers);
    let prox_gap = hausdorff(&lhs_set, &rhs_set);
    let scale = 1.0 + lhs_set.iter().chain(&rhs_set).flatten().fold(0.0f64, |m, t| m.max(t.abs()));
    Ok(ChangeDgfReport {
        psi_point: x_bar.to_vec(),
        prox_agree: prox_gap <= tol * scale,
        env_agree: values_agree(lhs.inf_value, env_rhs, tol),
        lhs_set,
        rhs_set,
        prox_gap,
        env_lhs: lhs.inf_value,
        env_rhs,
    })
}

/// `x̄ ↦ ∇κ(prox*_{λg}(x̄))` as a set-valued operator on `X`.
pub fn grad_right_prox_operator(k: &Kernel, g: &ObjectiveFn, lambda: f64, opts: &SolverOpts) -> SampledOperator {
    let (kk, gg, o) = (k.clone(), g.clone(), opts.clone());
    SampledOperator::new(
        format!("grad {k} o right prox of {}", g.label),
        k.domain.clone(),
        Domain::real_space(k.dim()),
        move |x| right_prox(&kk, &gg, lambda, x, &o).map(|r| grad_set(&kk, &r.minimizers)).unwrap_or_default(),
    )
}

/// Probes the main properties of the right operators along a polyline:
/// env* finite with bounded difference quotients, `∇κ∘prox*` locally
/// bounded, and, conditional on lsc of `∇κ ▷ g`, `∇κ∘prox*` nonempty with
/// closed graph. Nonemptiness is always reported, since its failure is the
/// expected symptom when lsc fails.
pub fn right_mainprop_probe(
    k: &Kernel,
    g: &ObjectiveFn,
    lambda: f64,
    grid: &[Point],
    opts: &SolverOpts,
) -> Result<ProbeReport> {
    check_lambda(lambda)?;
    check_right(g, k)?;
    let mut rep = ProbeReport::default();
    rep.preconditions.push(Check::new("full_domain", k.domain.is_full_space(), format!("dom {k} = {:?}", k.domain)));
    let pts: Vec<Point> = grid.iter().filter(|x| k.domain.contains(x)).cloned().collect();
    if let Some(x0) = pts.first() {
        let t = right_prox_bound_threshold(k, g, x0, (10.0 * lambda).max(10.0), opts)?;
        rep.preconditions.push(Check::new(
            "lambda_below_threshold",
            lambda < t.threshold_low || t.threshold_low == t.threshold_high,
            format!("lambda = {lambda}, threshold in [{}, {}] at {x0:?}", t.threshold_low, t.threshold_high),
        ));
    }
    let lsc = epi_comp_lsc_check(k, g, &conj_probe_grid(k), 1e-3)?;
    rep.preconditions.push(Check::new(
        "epi_composition_lsc",
        lsc.lsc(),
        match lsc.violations.first() {
            None => "no violation on the probe grid".to_string(),
            Some(v) => format!("value {} at {:?}, nearby minimum {}", v.value, v.xi, v.neighbourhood_min),
        },
    ));

    let env_on = |p: &[Point]| -> Result<Vec<ExtReal>> { p.iter().map(|x| right_env(k, g, lambda, x, opts)).collect() };
    let coarse = env_on(&pts)?;
    let fine_grid = refine_polyline(&pts);
    let fine = env_on(&fine_grid)?;
    let finite = coarse.iter().chain(&fine).all(|v| v.is_finite());
    rep.checks.push(Check::new("env_finite", finite, format!("{} grid points", fine_grid.len())));
    let (lip, detail) = if finite {
        let (_, qc) = max_jump(&pts, &coarse.iter().map(|v| v.to_f64()).collect::<Vec<_>>());
        let (_, qf) = max_jump(&fine_grid, &fine.iter().map(|v| v.to_f64()).collect::<Vec<_>>());
        (qf <= 2.0 * qc + 1e-6, format!("difference quotients {qc:e} -> {qf:e} under refinement"))
    } else {
        (false, "envelope not finite".to_string())
    };
    rep.checks.push(Check::new("env_locally_lipschitz", lip, detail));

    let op = grad_right_prox_operator(k, g, lambda, opts);
    let mut lb_fail = None;
    let mut empty = Vec::new();
    let mut osc_fail = None;
    for x in &pts {
        let v = check_local_bounded(&op, x, &LB_RADII)?;
        if !v.holds && lb_fail.is_none() {
            lb_fail = v.witness;
        }
        if op.value_at(x).is_empty() {
            empty.push(x.clone());
        }
        if lsc.lsc() {
            let v = check_osc(&op, x, OSC_TOL)?;
            if !v.holds && osc_fail.is_none() {
                osc_fail = v.witness;
            }
        }
    }
    rep.checks.push(Check::new(
        "grad_prox_locally_bounded",
        lb_fail.is_none(),
        lb_fail.unwrap_or_else(|| "bounded near grid points".into()),
    ));
    rep.checks.push(Check::new(
        "grad_prox_nonempty",
        empty.is_empty(),
        if empty.is_empty() { format!("{} points", pts.len()) } else { format!("empty at {empty:?}") },
    ));
    if lsc.lsc() {
        rep.checks.push(Check::new(
            "grad_prox_osc",
            osc_fail.is_none(),
            osc_fail.unwrap_or_else(|| "graph closed at grid points".into()),
        ));
    }
    Ok(rep)
}

/// `hull*_{λg} = −env_λ(−env*_λ g)`, with the inner right envelope cached
/// on a grid over `X` (closed faces included).
#[derive(Clone, Debug)]
pub struct RightHull {
    kernel: Kernel,
    g: ObjectiveFn,
    lambda: f64,
    neg_env: GridFn,
    refine: bool,
    opts: SolverOpts,
}

impl RightHull {
    pub fn new(k: &Kernel, g: &ObjectiveFn, lambda: f64, hull: HullOpts, opts: &SolverOpts) -> Result<Self> {
        check_lambda(lambda)?;
        check_right(g, k)?;
        let mut grid = interior_grid(k, hull_grid_per_axis(k, &hull), hull.margin);
        if let Some(iv) = k.domain.as_interval() {
            for (closed, t) in [(iv.lo_closed, iv.lo), (iv.hi_closed, iv.hi)] {
                if closed && t.is_finite() {
                    grid.push(vec![t]);
                }
            }
            grid.sort_by(|a, b| a[0].total_cmp(&b[0]));
        }
        let mut values = Vec::with_capacity(grid.len());
        for x in &grid {
            values.push(-right_env(k, g, lambda, x, opts)?);
        }
        Ok(RightHull {
            kernel: k.clone(),
            g: g.clone(),
            lambda,
            neg_env: GridFn::new(grid, values)?,
            refine: hull.refine,
            opts: opts.clone(),
        })
    }

    /// Defined on `int X`.
    pub fn eval(&self, y: &[f64]) -> Result<ExtReal> {
        if y.len() != self.kernel.dim() {
            return Err(Error::DimensionMismatch { expected: self.kernel.dim(), got: y.len() });
        }
        if !self.kernel.domain.contains_interior(y) {
            return Err(Error::OutsideDomain(y.to_vec()));
        }
        let (v, idx) = left_env_sampled(&self.kernel, &self.neg_env, self.lambda, y);
        let mut best = -v;
        if let (true, 1, Some(j), Some(b)) = (self.refine, y.len(), idx, best.finite()) {
            let pts = &self.neg_env.points;
            let a = pts[j.saturating_sub(1)][0];
            let c = pts[(j + 1).min(pts.len() - 1)][0];
            let phi = |t: f64| {
                let e = right_env(&self.kernel, &self.g, self.lambda, &[t], &self.opts).unwrap_or(ExtReal::NEG_INF);
                e.checked_sub(distance(&self.kernel, &[t], y).scale(1.0 / self.lambda)).unwrap_or(ExtReal::NEG_INF)
            };
            if let Some(r) = refine_sup(&phi, a, c, pts[j][0], b, self.opts.tol_1d) {
                best = ExtReal::from_eval(r);
            }
        }
        Ok(match best.finite() {
            Some(b) if b > self.opts.escape => ExtReal::POS_INF,
            _ => best,
        })
    }
}

pub fn right_hull(k: &Kernel, g: &ObjectiveFn, lambda: f64, y: &[f64], opts: &SolverOpts) -> Result<ExtReal> {
    RightHull::new(k, g, lambda, HullOpts::default(), opts)?.eval(y)
}

/// The convex hull of `κ* + λ(∇κ ▷ g)` on a uniform grid of `[lo, hi] ⊂ X*`,
/// for evaluating `(conv h − κ*)(∇κ(y))`.
#[derive(Clone, Debug)]
pub struct ConvexifiedConjSide {
    kernel: Kernel,
    hull: GridFn,
}

impl ConvexifiedConjSide {
    pub fn new(k: &Kernel, g: &ObjectiveFn, lambda: f64, lo: f64, hi: f64, n: usize) -> Result<Self> {
        check_lambda(lambda)?;
        if k.dim() != 1 {
            return Err(Error::Unsupported("convexified conjugate side is one-dimensional".into()));
        }
        if !(lo < hi) || n < 2 {
            return Err(Error::InvalidArgument(format!("bad grid {lo}:{hi}:{n}")));
        }
        let h = conj_side_function(k, g, lambda)?;
        let xs: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect();
        let vals = xs.iter().map(|&t| h.eval(&[t])).collect();
        Ok(ConvexifiedConjSide { kernel: k.clone(), hull: grid_biconjugate(&GridFn::from_1d(&xs, vals)?)? })
    }

    /// `(conv h)(ξ) − κ*(ξ)` at `ξ = ∇κ(y)`, interpolating the hull linearly.
    pub fn eval(&self, y: &[f64]) -> Result<ExtReal> {
        let xi = self.kernel.grad(y).ok_or_else(|| Error::OutsideDomain(y.to_vec()))?[0];
        let pts = &self.hull.points;
        let i = pts.partition_point(|p| p[0] < xi);
        if i == 0 || i >= pts.len() {
            return Err(Error::OutsideDomain(vec![xi]));
        }
        let (x0, x1) = (pts[i - 1][0], pts[i][0]);
        let (v0, v1) = (self.hull.values[i - 1], self.hull.values[i]);
        let w = (xi - x0) / (x1 - x0);
        let conv = match (v0.finite(), v1.finite()) {
            (Some(a), Some(b)) => ExtReal::from_eval(a + w * (b - a)),
            _ => v0.max(v1),
        };
        conv.checked_sub(self.kernel.conj_value(&[xi]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functions::make_function;
    use crate::kernels::make_kernel;
    use crate::numerics::ProxStatus;

    fn k(name: &str) -> Kernel {
        make_kernel(name, &[]).unwrap()
    }

    fn g(name: &str, k: &Kernel) -> ObjectiveFn {
        make_function(name, &[], k, Side::Right).unwrap()
    }

    fn o() -> SolverOpts {
        SolverOpts::default()
    }

    #[test]
    fn envelope_counterexample() {
        let pw = k("piecewise_env_star");
        let inv = g("inv", &pw);
        let r = right_prox(&pw, &inv, 2.0, &[1.0], &o()).unwrap();
        assert_eq!(r.status, ProxStatus::EmptyInfNotAttained);
        assert!((r.inf_value.to_f64() - 0.5).abs() < 1e-6);
        let r = right_prox(&pw, &inv, 0.1, &[1.0], &o()).unwrap();
        assert_eq!(r.status, ProxStatus::Nonempty);
        assert!((r.minimizers[0][0] - 20.0 / 19.0).abs() < 1e-6);
        assert!((r.inf_value.to_f64() - 0.975).abs() < 1e-9);
    }

    #[test]
    fn zero_function_keeps_the_point() {
        for name in ["euclidean", "burg", "exp", "boxed_quadratic"] {
            let kk = k(name);
            let r = right_prox(&kk, &g("zero", &kk), 1.3, &[0.6], &o()).unwrap();
            assert!((r.minimizers[0][0] - 0.6).abs() < 1e-6, "{name}");
            assert!(r.inf_value.to_f64().abs() < 1e-12);
        }
        let bq = k("boxed_quadratic");
        assert!(matches!(right_prox(&bq, &g("zero", &bq), 1.0, &[2.0], &o()), Err(Error::OutsideDomain(_))));
        // the anchor may sit on a closed face
        assert!(right_prox(&bq, &g("zero", &bq), 1.0, &[1.0], &o()).is_ok());
    }

    #[test]
    fn epi_composition_values() {
        let pw = k("piecewise_env_star");
        let inv = g("inv", &pw);
        let legendre = EpiComposition::with_method(&pw, &inv, EpiMethod::Legendre).unwrap();
        let pre = EpiComposition::with_method(&pw, &inv, EpiMethod::Preimage).unwrap();
        for e in [&legendre, &pre] {
            assert!((e.eval(&[-1.0]).unwrap().to_f64() - 2.0).abs() < 1e-8);
            assert!((e.eval(&[0.75]).unwrap().to_f64() - 0.5).abs() < 1e-8);
            assert!(e.eval(&[1.0]).unwrap().is_pos_inf());
            assert!(e.eval(&[-2.5]).unwrap().is_pos_inf());
        }
        for xi in [-1.9, -0.3, 0.0, 0.2, 0.9, 0.999] {
            let a = legendre.eval(&[xi]).unwrap().to_f64();
            let b = pre.eval(&[xi]).unwrap().to_f64();
            assert!((a - b).abs() < 1e-7 * (1.0 + a.abs()), "{xi}: {a} vs {b}");
        }
        let e = k("exp");
        let sq = g("sq", &e);
        assert_eq!(epi_composition(&e, &sq, &[2.0]).unwrap(), sq.eval(&[2f64.ln()]));
    }

    #[test]
    fn lsc_checks() {
        let pw = k("piecewise_env_star");
        let r = epi_comp_lsc_check(&pw, &g("inv", &pw), &conj_probe_grid(&pw), 1e-3).unwrap();
        assert_eq!(r.violations.len(), 1, "{:?}", r.violations);
        assert_eq!(r.violations[0].xi, vec![1.0]);
        assert!(!r.any_sufficient());
        let eu = k("euclidean");
        let r = epi_comp_lsc_check(&eu, &g("double_well", &eu), &conj_probe_grid(&eu), 1e-3).unwrap();
        assert!(r.lsc() && r.legendre_open_conj_domain);
        let e = k("exp");
        let r = epi_comp_lsc_check(&e, &g("sq", &e), &conj_probe_grid(&e), 1e-3).unwrap();
        assert!(r.lsc(), "{:?}", r.violations);
        assert!(r.g_coercive);
    }

    #[test]
    fn conjugate_forms() {
        let e = k("exp");
        let sq = g("sq", &e);
        let v = right_env_conjugate_form(&e, &sq, 1.0, &[0.0], None, &o()).unwrap();
        let d = right_env(&e, &sq, 1.0, &[0.0], &o()).unwrap();
        assert!((v.to_f64() - d.to_f64()).abs() < 1e-4, "{v} vs {d}");
        let pw = k("piecewise_env_star");
        let inv = g("inv", &pw);
        let v = right_env_conjugate_form(&pw, &inv, 0.1, &[1.0], None, &o()).unwrap();
        assert!((v.to_f64() - 0.1 * 0.975).abs() < 1e-3, "{v}");
        let z = right_env_conjugate_form(&e, &g("zero", &e), 1.0, &[0.3], None, &o()).unwrap();
        assert!(z.to_f64().abs() < 1e-6);
    }

    #[test]
    fn thresholds() {
        let pw = k("piecewise_env_star");
        let t = right_prox_bound_threshold(&pw, &g("inv", &pw), &[1.0], 10.0, &o()).unwrap();
        assert_eq!(t.threshold_high, 10.0);
        let eu = k("euclidean");
        let t = right_prox_bound_threshold(&eu, &g("neg_sq", &eu), &[0.3], 10.0, &o()).unwrap();
        assert!(t.threshold_low <= 0.5 && 0.5 <= t.threshold_high, "{t:?}");
    }

    #[test]
    fn change_of_kernel() {
        let e = k("exp");
        let r = change_dgf_right_check(&e, &k("euclidean"), &g("sq", &e), 1.0, &[0.0], 1e-4, &o()).unwrap();
        assert!(r.holds(), "{r:?}");
        let r = change_dgf_right_check(&e, &e, &g("sq", &e), 1.0, &[0.0], 1e-9, &o()).unwrap();
        assert!(r.holds(), "{r:?}");
    }

    #[test]
    fn main_properties() {
        let e = k("exp");
        let grid: Vec<Point> = [-1.0, 0.0, 1.0].iter().map(|&t| vec![t]).collect();
        let r = right_mainprop_probe(&e, &g("sq", &e), 0.5, &grid, &o()).unwrap();
        assert!(r.all_pass(), "{r:?}");
        let pw = k("piecewise_env_star");
        let r = right_mainprop_probe(&pw, &g("inv", &pw), 2.0, &[vec![1.0]], &o()).unwrap();
        assert!(!r.get("epi_composition_lsc").unwrap().pass);
        let c = r.get("grad_prox_nonempty").unwrap();
        assert!(!c.pass && c.detail.contains("1.0"));
    }
}
