//! Left Bregman proximal map, envelope and hull, the prox-boundedness
//! threshold, and the conjugate-form and change-of-kernel identities.

use crate::bregman::{check_lambda, distance};
use crate::error::{Error, Result};
use crate::kernels::{certify_kernel, default_probes, range_samples, interior_grid, Kernel};
use crate::numerics::scalar::brent;
use crate::numerics::{
    dist_inf, minimize_over, numeric_conjugate, Domain, ExtReal, GridFn, ObjectiveFn, Point, ProxResult, ProxStatus,
    Side, SolverOpts,
};
use crate::report::{hausdorff, Check, ProbeReport};
use crate::right::right_env_sampled;
use crate::setvalued::{check_local_bounded, check_osc, SampledOperator, LB_RADII, OSC_TOL};

/// `a + b` where an undefined `−∞ + ∞` counts as `+∞`: the `+∞` always
/// comes from a point outside the effective domain.
pub(crate) fn plus(a: ExtReal, b: ExtReal) -> ExtReal {
    a.checked_add(b).unwrap_or(ExtReal::POS_INF)
}

fn check_point(k: &Kernel, p: &[f64]) -> Result<()> {
    if p.len() != k.dim() {
        return Err(Error::DimensionMismatch { expected: k.dim(), got: p.len() });
    }
    if p.iter().any(|t| t.is_nan()) {
        return Err(Error::NotANumber);
    }
    Ok(())
}

fn check_left(f: &ObjectiveFn, k: &Kernel) -> Result<()> {
    if f.side != Side::Left {
        return Err(Error::InvalidArgument(format!("`{}` is a right function", f.label)));
    }
    if f.dim() != k.dim() {
        return Err(Error::DimensionMismatch { expected: k.dim(), got: f.dim() });
    }
    Ok(())
}

/// `f(x) + D(x, ȳ)/λ`.
pub fn left_objective<'a>(k: &'a Kernel, f: &'a ObjectiveFn, lambda: f64, y_bar: &'a [f64]) -> impl Fn(&[f64]) -> ExtReal + 'a {
    move |x: &[f64]| plus(f.eval(x), distance(k, x, y_bar).scale(1.0 / lambda))
}

/// `prox_{λf}(ȳ) = argmin_{x ∈ X} f(x) + D(x, ȳ)/λ`, defined for `ȳ ∈ int X`.
pub fn left_prox(k: &Kernel, f: &ObjectiveFn, lambda: f64, y_bar: &[f64], opts: &SolverOpts) -> Result<ProxResult> {
    check_lambda(lambda)?;
    check_left(f, k)?;
    check_point(k, y_bar)?;
    if !k.domain.contains_interior(y_bar) {
        return Err(Error::ProxUndefined(y_bar.to_vec()));
    }
    let dom = f.domain.intersect(&k.domain)?;
    let obj = left_objective(k, f, lambda, y_bar);
    minimize_over(&obj, &dom, opts)
}

/// `env_{λf}(ȳ)`, the infimum of the same objective.
pub fn left_env(k: &Kernel, f: &ObjectiveFn, lambda: f64, y_bar: &[f64], opts: &SolverOpts) -> Result<ExtReal> {
    Ok(left_prox(k, f, lambda, y_bar, opts)?.inf_value)
}

/// `min_j h_j + D(x_j, y)/λ` over a sampled function on `X`; returns the
/// value and the index attaining it.
pub fn left_env_sampled(k: &Kernel, h: &GridFn, lambda: f64, y: &[f64]) -> (ExtReal, Option<usize>) {
    let mut best = (ExtReal::POS_INF, None);
    for (j, (x, v)) in h.points.iter().zip(&h.values).enumerate() {
        let c = plus(*v, distance(k, x, y).scale(1.0 / lambda));
        if c < best.0 {
            best = (c, Some(j));
        }
    }
    best
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HullOpts {
    /// Grid points per axis in one dimension; higher dimensions use
    /// `min(per_axis, 24)` per axis.
    pub per_axis: usize,
    /// Distance kept from open faces of `X`.
    pub margin: f64,
    /// Polish the grid supremum by a local scalar search (1-D only).
    pub refine: bool,
}

impl Default for HullOpts {
    fn default() -> Self {
        HullOpts { per_axis: 512, margin: 1e-6, refine: true }
    }
}

pub(crate) fn hull_grid_per_axis(k: &Kernel, h: &HullOpts) -> usize {
    if k.dim() == 1 {
        h.per_axis
    } else {
        h.per_axis.min(24)
    }
}

/// Maximizes `phi` on `[a, b]` starting from a grid point; `None` when the
/// local search found nothing better.
pub(crate) fn refine_sup(phi: &dyn Fn(f64) -> ExtReal, a: f64, b: f64, t0: f64, v0: f64, tol: f64) -> Option<f64> {
    if !(a < b) {
        return None;
    }
    let neg = |t: f64| match phi(t).finite() {
        Some(v) => -v,
        None => f64::INFINITY,
    };
    let (_, fx) = brent(&neg, a, b, t0, -v0, tol);
    (-fx > v0).then_some(-fx)
}

/// `hull_{λf} = −env*_λ(−env_λ f)`, with the inner envelope cached on a grid
/// over `int X`. The supremum over `int X` is approximated by the supremum
/// over the grid, refined locally in one dimension.
#[derive(Clone, Debug)]
pub struct LeftHull {
    kernel: Kernel,
    f: ObjectiveFn,
    lambda: f64,
    neg_env: GridFn,
    refine: bool,
    opts: SolverOpts,
}

impl LeftHull {
    pub fn new(k: &Kernel, f: &ObjectiveFn, lambda: f64, hull: HullOpts, opts: &SolverOpts) -> Result<Self> {
        check_lambda(lambda)?;
        check_left(f, k)?;
        let grid = interior_grid(k, hull_grid_per_axis(k, &hull), hull.margin);
        let mut values = Vec::with_capacity(grid.len());
        for y in &grid {
            values.push(-left_env(k, f, lambda, y, opts)?);
        }
        Ok(LeftHull {
            kernel: k.clone(),
            f: f.clone(),
            lambda,
            neg_env: GridFn::new(grid, values)?,
            refine: hull.refine,
            opts: opts.clone(),
        })
    }

    pub fn eval(&self, x: &[f64]) -> Result<ExtReal> {
        check_point(&self.kernel, x)?;
        if !self.kernel.domain.contains(x) {
            return Err(Error::OutsideDomain(x.to_vec()));
        }
        let (v, idx) = right_env_sampled(&self.kernel, &self.neg_env, self.lambda, x);
        let mut best = -v;
        if let (true, 1, Some(j), Some(b)) = (self.refine, x.len(), idx, best.finite()) {
            let pts = &self.neg_env.points;
            let a = pts[j.saturating_sub(1)][0];
            let c = pts[(j + 1).min(pts.len() - 1)][0];
            let phi = |t: f64| {
                let e = left_env(&self.kernel, &self.f, self.lambda, &[t], &self.opts).unwrap_or(ExtReal::NEG_INF);
                e.checked_sub(distance(&self.kernel, x, &[t]).scale(1.0 / self.lambda)).unwrap_or(ExtReal::NEG_INF)
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

    pub fn grid_len(&self) -> usize {
        self.neg_env.points.len()
    }
}

/// One-shot hull evaluation with the default grid.
pub fn left_hull(k: &Kernel, f: &ObjectiveFn, lambda: f64, x: &[f64], opts: &SolverOpts) -> Result<ExtReal> {
    LeftHull::new(k, f, lambda, HullOpts::default(), opts)?.eval(x)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProxBoundReport {
    pub threshold_low: f64,
    pub threshold_high: f64,
    pub probe_point: Point,
    pub method: String,
    /// Unbounded already at the smallest trial stepsize.
    pub flagged: bool,
    /// Every trial: `(λ, envelope finite)`.
    pub trace: Vec<(f64, bool)>,
    /// Unboundedness certificate at `threshold_high`, if any.
    pub certificate: String,
}

/// Bisection on `(0, lambda_max]` for the largest stepsize at which the
/// envelope at the probe stays finite. `classify` returns whether it is
/// finite, and the solver certificate.
pub(crate) fn bisect_threshold(
    probe: &[f64],
    lambda_max: f64,
    classify: &dyn Fn(f64) -> Result<(bool, String)>,
) -> Result<ProxBoundReport> {
    check_lambda(lambda_max)?;
    let smallest = lambda_max * 1e-6;
    let mut trace = Vec::new();
    let mut run = |l: f64| -> Result<(bool, String)> {
        let r = classify(l)?;
        trace.push((l, r.0));
        Ok(r)
    };
    let (ok, cert) = run(smallest)?;
    if !ok {
        return Ok(ProxBoundReport {
            threshold_low: 0.0,
            threshold_high: smallest,
            probe_point: probe.to_vec(),
            method: "unbounded at the smallest trial stepsize".into(),
            flagged: true,
            trace,
            certificate: cert,
        });
    }
    let (ok, mut cert) = run(lambda_max)?;
    if ok {
        return Ok(ProxBoundReport {
            threshold_low: lambda_max,
            threshold_high: lambda_max,
            probe_point: probe.to_vec(),
            method: "finite up to lambda_max".into(),
            flagged: false,
            trace,
            certificate: String::new(),
        });
    }
    let (mut lo, mut hi) = (smallest, lambda_max);
    while hi - lo > 1e-3 * lo.max(1.0) {
        let mid = 0.5 * (lo + hi);
        let (ok, c) = run(mid)?;
        if ok {
            lo = mid;
        } else {
            hi = mid;
            cert = c;
        }
    }
    Ok(ProxBoundReport {
        threshold_low: lo,
        threshold_high: hi,
        probe_point: probe.to_vec(),
        method: "bisection on envelope finiteness".into(),
        flagged: false,
        trace,
        certificate: cert,
    })
}

pub(crate) fn classify(r: &ProxResult) -> (bool, String) {
    let finite = r.status != ProxStatus::UnboundedBelow && !r.inf_value.is_neg_inf();
    (finite, r.certificate.clone())
}

/// Estimates the prox-boundedness threshold `λ_f` at `probe_y`.
pub fn prox_bound_threshold(
    k: &Kernel,
    f: &ObjectiveFn,
    probe_y: &[f64],
    lambda_max: f64,
    opts: &SolverOpts,
) -> Result<ProxBoundReport> {
    check_left(f, k)?;
    check_point(k, probe_y)?;
    if !k.domain.contains_interior(probe_y) {
        return Err(Error::ProxUndefined(probe_y.to_vec()));
    }
    bisect_threshold(probe_y, lambda_max, &|l| Ok(classify(&left_prox(k, f, l, probe_y, opts)?)))
}

/// `λf + κ` on `dom f ∩ X`.
pub fn scaled_plus_kernel(k: &Kernel, f: &ObjectiveFn, lambda: f64) -> Result<ObjectiveFn> {
    let dom = f.domain.intersect(&k.domain)?;
    let (kk, ff) = (k.clone(), f.clone());
    Ok(ObjectiveFn::new(format!("{lambda}*{}+kappa", f.label), dom, Side::Left, move |x| {
        plus(ff.eval(x).scale(lambda), kk.value(x)).to_f64()
    }))
}

/// `λ·env_{λf}(ȳ) = κ*(∇κ(ȳ)) − (λf + κ)*(∇κ(ȳ))`, the conjugate numeric.
pub fn env_conjugate_form(
    k: &Kernel,
    f: &ObjectiveFn,
    lambda: f64,
    y_bar: &[f64],
    search: Option<&Domain>,
    opts: &SolverOpts,
) -> Result<ExtReal> {
    check_lambda(lambda)?;
    check_left(f, k)?;
    check_point(k, y_bar)?;
    let xi = k.grad(y_bar).ok_or_else(|| Error::ProxUndefined(y_bar.to_vec()))?;
    let h = scaled_plus_kernel(k, f, lambda)?;
    let hc = numeric_conjugate(&h, &xi, search, opts)?;
    k.conj_value(&xi).checked_sub(hc)
}

#[derive(Clone, Debug)]
pub struct ChangeDgfReport {
    /// Point at which the `ψ`-side operator is evaluated.
    pub psi_point: Point,
    pub lhs_set: Vec<Point>,
    pub rhs_set: Vec<Point>,
    pub prox_gap: f64,
    pub env_lhs: ExtReal,
    pub env_rhs: ExtReal,
    pub prox_agree: bool,
    pub env_agree: bool,
}

impl ChangeDgfReport {
    pub fn holds(&self) -> bool {
        self.prox_agree && self.env_agree
    }
}

pub(crate) fn values_agree(a: ExtReal, b: ExtReal, tol: f64) -> bool {
    match (a.finite(), b.finite()) {
        (Some(x), Some(y)) => (x - y).abs() <= tol * (1.0 + x.abs().max(y.abs())),
        _ => a == b,
    }
}

/// Checks the hypotheses of a change of kernel `κ → ψ` on samples:
/// `ψ` Legendre, `dom ψ ⊇ dom κ` and `range ∇ψ ⊇ range ∇κ`.
pub(crate) fn change_dgf_hypotheses(k: &Kernel, psi: &Kernel) -> Result<()> {
    if k.dim() != psi.dim() {
        return Err(Error::DimensionMismatch { expected: k.dim(), got: psi.dim() });
    }
    if !psi.flags.legendre {
        return Err(Error::KernelProperty { kernel: psi.to_string(), property: "legendre" });
    }
    let mut samples = range_samples(k);
    samples.extend(default_probes(k));
    if let Some(x) = samples.iter().find(|x| !psi.domain.contains(x)) {
        return Err(Error::Hypothesis(format!("dom {psi} does not contain dom {k}: witness {x:?}")));
    }
    for y in samples.iter().filter(|y| k.domain.contains_interior(y)) {
        if let Some(g) = k.grad(y) {
            if !psi.conj_domain.contains_interior(&g) {
                return Err(Error::Hypothesis(format!(
                    "range grad {psi} does not contain grad {k}({y:?}) = {g:?}"
                )));
            }
        }
    }
    Ok(())
}

/// Verifies `prox_{λf}(ȳ) = prox^ψ_{λF}(∇ψ*(∇κ(ȳ)))` with
/// `F = f + (κ − ψ)/λ` on `X`, and
/// `env_{λf}(ȳ) = env^ψ_{λF}(z) + (κ*(ξ) − ψ*(ξ))/λ` at `ξ = ∇κ(ȳ)`.
pub fn change_dgf_left_check(
    k: &Kernel,
    psi: &Kernel,
    f: &ObjectiveFn,
    lambda: f64,
    y_bar: &[f64],
    tol: f64,
    opts: &SolverOpts,
) -> Result<ChangeDgfReport> {
    check_lambda(lambda)?;
    change_dgf_hypotheses(k, psi)?;
    let xi = k.grad(y_bar).ok_or_else(|| Error::ProxUndefined(y_bar.to_vec()))?;
    let z = psi.conj_grad(&xi).ok_or_else(|| Error::Hypothesis(format!("grad {k}({y_bar:?}) outside range grad {psi}")))?;
    let dom = f.domain.intersect(&k.domain)?;
    let (kk, pp, ff) = (k.clone(), psi.clone(), f.clone());
    let big_f = ObjectiveFn::new(format!("{}+(kappa-psi)/lambda", f.label), dom, Side::Left, move |x| {
        let c = kk.value(x).checked_sub(pp.value(x)).unwrap_or(ExtReal::POS_INF);
        plus(ff.eval(x), c.scale(1.0 / lambda)).to_f64()
    });
    let lhs = left_prox(k, f, lambda, y_bar, opts)?;
    let rhs = left_prox(psi, &big_f, lambda, &z, opts)?;
    let shift = k.conj_value(&xi).checked_sub(psi.conj_value(&xi))?.scale(1.0 / lambda);
    let env_rhs = rhs.inf_value.checked_add(shift)?;
    let prox_gap = hausdorff(&lhs.minimizers, &rhs.minimizers);
    let scale = 1.0 + lhs.minimizers.iter().chain(&rhs.minimizers).flatten().fold(0.0f64, |m, t| m.max(t.abs()));
    Ok(ChangeDgfReport {
        psi_point: z,
        prox_agree: prox_gap <= tol * scale,
        env_agree: values_agree(lhs.inf_value, env_rhs, tol),
        lhs_set: lhs.minimizers,
        rhs_set: rhs.minimizers,
        prox_gap,
        env_lhs: lhs.inf_value,
        env_rhs,
    })
}

/// `ȳ ↦ prox_{λf}(ȳ)` as a set-valued operator; empty off `int X`.
pub fn left_prox_operator(
    k: &Kernel,
    f: &ObjectiveFn,
    lambda: f64,
    source: Domain,
    target: Domain,
    opts: &SolverOpts,
) -> SampledOperator {
    let (kk, ff, o) = (k.clone(), f.clone(), opts.clone());
    SampledOperator::new(format!("prox of {} under {k}", f.label), source, target, move |y| {
        if !kk.domain.contains_interior(y) {
            return Vec::new();
        }
        left_prox(&kk, &ff, lambda, y, &o).map(|r| r.minimizers).unwrap_or_default()
    })
}

/// Inserts midpoints between consecutive grid points.
pub(crate) fn refine_polyline(grid: &[Point]) -> Vec<Point> {
    let mut out = Vec::with_capacity(2 * grid.len());
    for w in grid.windows(2) {
        out.push(w[0].clone());
        out.push(w[0].iter().zip(&w[1]).map(|(a, b)| 0.5 * (a + b)).collect());
    }
    out.extend(grid.last().cloned());
    out
}

pub(crate) fn max_jump(grid: &[Point], vals: &[f64]) -> (f64, f64) {
    let mut jump = 0.0f64;
    let mut quotient = 0.0f64;
    for i in 1..vals.len() {
        let d = (vals[i] - vals[i - 1]).abs();
        jump = jump.max(d);
        quotient = quotient.max(d / dist_inf(&grid[i], &grid[i - 1]).max(f64::MIN_POSITIVE));
    }
    (jump, quotient)
}

/// Probes the main properties of the left operators along a polyline of
/// points: (a) prox nonempty, (b) env finite and continuous, (c) prox
/// graph closed (osc), (d) prox locally bounded.
pub fn mainprop_probe(k: &Kernel, f: &ObjectiveFn, lambda: f64, grid: &[Point], opts: &SolverOpts) -> Result<ProbeReport> {
    check_lambda(lambda)?;
    check_left(f, k)?;
    let mut rep = ProbeReport::default();
    let cert = certify_kernel(k, &default_probes(k), 1e-6);
    let coercive = cert.get("one_coercive").map_or(false, |c| c.pass);
    rep.preconditions.push(Check::new("one_coercive", coercive, format!("certified for {k}")));
    if let Some(y0) = grid.iter().find(|y| k.domain.contains_interior(y)) {
        let t = prox_bound_threshold(k, f, y0, (10.0 * lambda).max(10.0), opts)?;
        rep.preconditions.push(Check::new(
            "lambda_below_threshold",
            lambda < t.threshold_low || t.threshold_low == t.threshold_high,
            format!("lambda = {lambda}, threshold in [{}, {}] at {y0:?}", t.threshold_low, t.threshold_high),
        ));
    }

    let interior: Vec<Point> = grid.iter().filter(|y| k.domain.contains_interior(y)).cloned().collect();
    let mut empty = Vec::new();
    for y in &interior {
        if !left_prox(k, f, lambda, y, opts)?.is_nonempty() {
            empty.push(y.clone());
        }
    }
    rep.checks.push(Check::new(
        "prox_nonempty",
        empty.is_empty(),
        if empty.is_empty() { format!("{} points", interior.len()) } else { format!("empty at {empty:?}") },
    ));

    let env_on = |pts: &[Point]| -> Result<Vec<ExtReal>> { pts.iter().map(|y| left_env(k, f, lambda, y, opts)).collect() };
    let coarse = env_on(&interior)?;
    let fine_grid = refine_polyline(&interior);
    let fine = env_on(&fine_grid)?;
    let finite = coarse.iter().chain(&fine).all(|v| v.is_finite());
    let (continuous, detail) = if finite {
        let c: Vec<f64> = coarse.iter().map(|v| v.to_f64()).collect();
        let fv: Vec<f64> = fine.iter().map(|v| v.to_f64()).collect();
        let (jc, _) = max_jump(&interior, &c);
        let (jf, _) = max_jump(&fine_grid, &fv);
        (jf <= 0.75 * jc || jf <= 1e-9, format!("max jump {jc:e} -> {jf:e} under refinement"))
    } else {
        (false, "envelope not finite on the grid".to_string())
    };
    rep.checks.push(Check::new("env_finite_continuous", finite && continuous, detail));

    let y_dom = k.domain.interior();
    let op = left_prox_operator(k, f, lambda, y_dom.clone(), k.domain.clone(), opts);
    let mut osc_fail = None;
    let mut lb_fail = None;
    for y in &interior {
        let v = check_osc(&op, y, OSC_TOL)?;
        if !v.holds && osc_fail.is_none() {
            osc_fail = v.witness;
        }
        let v = check_local_bounded(&op, y, &LB_RADII)?;
        if !v.holds && lb_fail.is_none() {
            lb_fail = v.witness;
        }
    }
    rep.checks.push(Check::new("prox_osc", osc_fail.is_none(), osc_fail.unwrap_or_else(|| "graph closed at grid points".into())));
    rep.checks.push(Check::new(
        "prox_locally_bounded",
        lb_fail.is_none(),
        lb_fail.unwrap_or_else(|| "bounded near grid points".into()),
    ));
    Ok(rep)
}
