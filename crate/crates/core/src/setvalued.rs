//! Sampled set-valued operators `T: X ⇉ Y` and semicontinuity checkers that
//! work relative to the declared source `X` and target `Y`.
//!
//! Every check is a finite experiment: sequences approaching the base point
//! at a few rates, dilations by a few radii. For the piecewise-analytic
//! operators of the catalog this is decisive; for general operators it is
//! only evidence, which every report says.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::numerics::{dist_inf, Domain, Interval, Point};

pub const CAVEAT: &str = "finite sampling: verdicts are exact for piecewise-analytic operators, evidence otherwise";

pub type ValueAt = Arc<dyn Fn(&[f64]) -> Vec<Point> + Send + Sync>;

#[derive(Clone)]
pub struct SampledOperator {
    pub source: Domain,
    pub target: Domain,
    pub label: String,
    value: ValueAt,
}

impl fmt::Debug for SampledOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SampledOperator")
            .field("label", &self.label)
            .field("source", &self.source)
            .field("target", &self.target)
            .finish()
    }
}

impl SampledOperator {
    pub fn new(
        label: impl Into<String>,
        source: Domain,
        target: Domain,
        value: impl Fn(&[f64]) -> Vec<Point> + Send + Sync + 'static,
    ) -> Self {
        SampledOperator { source, target, label: label.into(), value: Arc::new(value) }
    }

    /// `T(x)`; empty off the source, and only points of the target are kept.
    pub fn value_at(&self, x: &[f64]) -> Vec<Point> {
        if !self.source.contains(x) {
            return Vec::new();
        }
        let mut v = (self.value)(x);
        v.retain(|p| self.target.contains(p));
        v
    }

    /// Same graph viewed with a different source and target.
    pub fn with_spaces(&self, source: Domain, target: Domain) -> Self {
        SampledOperator { source, target, ..self.clone() }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Verdict {
    pub holds: bool,
    pub witness: Option<String>,
}

impl Verdict {
    fn yes() -> Self {
        Verdict { holds: true, witness: None }
    }

    fn no(w: String) -> Self {
        Verdict { holds: false, witness: Some(w) }
    }
}

fn directions(dim: usize) -> Vec<Point> {
    let mut out = Vec::new();
    for i in 0..dim {
        for s in [1.0, -1.0] {
            let mut d = vec![0.0; dim];
            d[i] = s;
            out.push(d);
        }
    }
    out
}

/// Approach rates: (name, step sizes in decreasing order).
fn rates() -> Vec<(&'static str, Vec<f64>)> {
    let ks: Vec<f64> = [1, 2, 5, 10, 20, 50, 100, 200, 500, 1000, 2000, 5000, 10000].iter().map(|&k| k as f64).collect();
    vec![
        ("1/k", ks.iter().map(|k| 0.5 / k).collect()),
        ("1/k^2", ks.iter().map(|k| 0.5 / (k * k)).collect()),
        ("2^-k", (1..=40).map(|k| 0.5f64.powi(k)).collect()),
    ]
}

fn min_dist(p: &[f64], set: &[Point]) -> f64 {
    set.iter().map(|q| dist_inf(p, q)).fold(f64::INFINITY, f64::min)
}

fn require_source(op: &SampledOperator, x: &[f64]) -> Result<()> {
    if op.source.contains(x) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{:?} is not in the source of {}", x, op.label)))
    }
}

/// Outer semicontinuity at `x`: limits (within the target!) of graph
/// sequences `(xᵏ, yᵏ) → (x, y)` must satisfy `y ∈ T(x)`.
pub fn check_osc(op: &SampledOperator, x: &[f64], tol: f64) -> Result<Verdict> {
    require_source(op, x)?;
    let tx = op.value_at(x);
    for d in directions(x.len()) {
        for (rate, steps) in rates() {
            let samples: Vec<(Point, Vec<Point>)> = steps
                .iter()
                .map(|s| x.iter().zip(&d).map(|(a, b)| a + s * b).collect::<Point>())
                .filter(|p| op.source.contains(p) && p.as_slice() != x)
                .map(|p| {
                    let v = op.value_at(&p);
                    (p, v)
                })
                .filter(|(_, v)| !v.is_empty())
                .collect();
            if samples.len() < 3 {
                continue;
            }
            let tail = &samples[samples.len() - 3..];
            for l in &tail[2].1 {
                // a branch converges if the previous tail sets stay within tol
                let converges = tail[..2].iter().all(|(_, v)| min_dist(l, v) <= tol);
                if !converges {
                    continue;
                }
                let limit = op.target.snap_to_boundary(l, tol);
                if !op.target.contains(&limit) {
                    continue;
                }
                if min_dist(&limit, &tx) > tol {
                    return Ok(Verdict::no(format!(
                        "x^k -> {x:?} at rate {rate} along {d:?}: y^k -> {limit:?} not in T(x) = {tx:?}"
                    )));
                }
            }
        }
    }
    Ok(Verdict::yes())
}

fn neighbourhood(op: &SampledOperator, x: &[f64], r: f64) -> Vec<Point> {
    let mut pts = Vec::new();
    for d in directions(x.len()) {
        let mut t = 1.0;
        while t >= 1e-12 {
            let p: Point = x.iter().zip(&d).map(|(a, b)| a + r * t * b).collect();
            if op.source.contains(&p) {
                pts.push(p);
            }
            t /= if t > 1e-2 { 2.0 } else { 10.0 };
        }
    }
    pts
}

/// Local boundedness at `x`: the values over a small neighbourhood fit in a
/// box of diameter below `1e9`.
pub fn check_local_bounded(op: &SampledOperator, x: &[f64], radii: &[f64]) -> Result<Verdict> {
    require_source(op, x)?;
    let r = radii.iter().copied().fold(f64::INFINITY, f64::min);
    let r = if r.is_finite() { r } else { 1e-2 };
    let mut pts = neighbourhood(op, x, r);
    pts.push(x.to_vec());
    let mut lo = vec![f64::INFINITY; op.target.dim()];
    let mut hi = vec![f64::NEG_INFINITY; op.target.dim()];
    for p in &pts {
        for y in op.value_at(p) {
            for i in 0..y.len() {
                lo[i] = lo[i].min(y[i]);
                hi[i] = hi[i].max(y[i]);
            }
            let diam = lo.iter().zip(&hi).map(|(a, b)| b - a).fold(0.0, f64::max);
            if !(diam < 1e9) {
                return Ok(Verdict::no(format!("T({p:?}) contains {y:?}; box diameter {diam:e} within radius {r:e}")));
            }
        }
    }
    Ok(Verdict::yes())
}

/// Upper semicontinuity at `x`, with open sets `V ⊇ T(x)` replaced by the
/// dilations `T(x) + ε·B` for the given `ε`.
pub fn check_usc(op: &SampledOperator, x: &[f64], dilation_eps: &[f64]) -> Result<Verdict> {
    require_source(op, x)?;
    let tx = op.value_at(x);
    for &eps in dilation_eps {
        let mut leak = None;
        let mut ok = false;
        for j in 1..=8 {
            let r = 10f64.powi(-j);
            let bad = neighbourhood(op, x, r).into_iter().find_map(|p| {
                op.value_at(&p).into_iter().find(|y| !(min_dist(y, &tx) < eps)).map(|y| (p, y))
            });
            match bad {
                None => {
                    ok = true;
                    break;
                }
                Some(b) => leak = Some(b),
            }
        }
        if !ok {
            let (p, y) = leak.unwrap_or_default();
            return Ok(Verdict::no(format!(
                "every sampled neighbourhood leaks out of T(x)+{eps}B: {y:?} in T({p:?}), T(x) = {tx:?}"
            )));
        }
    }
    Ok(Verdict::yes())
}

#[derive(Clone, Debug)]
pub struct ImplicationRow {
    pub x: Point,
    pub osc: bool,
    pub usc: bool,
    pub locally_bounded: bool,
    pub closed_valued: bool,
    pub bounded_valued: bool,
    pub compact_valued: bool,
    /// `gph T` closed in `X × ℝⁿ` (osc with the target widened to ℝⁿ).
    pub graph_closed_ambient: bool,
}

#[derive(Clone, Debug)]
pub struct ImplicationReport {
    pub operator: String,
    pub target_closed: bool,
    pub rows: Vec<ImplicationRow>,
    pub violations: Vec<String>,
    pub caveat: &'static str,
}

pub const OSC_TOL: f64 = 1e-6;
pub const LB_RADII: [f64; 2] = [1e-1, 1e-2];
pub const USC_EPS: [f64; 3] = [0.25, 0.1, 0.01];

/// Evaluates the properties at each probe point and checks the implication
/// arrows between them; arrows needing a closed target are only asserted
/// when the target is closed in ℝⁿ.
pub fn implication_matrix(op: &SampledOperator, probes: &[Point]) -> Result<ImplicationReport> {
    let ambient = op.with_spaces(op.source.clone(), Domain::real_space(op.target.dim()));
    let target_closed = op.target.is_closed();
    let mut rows = Vec::new();
    let mut violations = Vec::new();
    for x in probes {
        let tx = op.value_at(x);
        // sampled values are finite sets: closed, bounded, compact
        let closed_valued = true;
        let bounded_valued = tx.iter().all(|y| y.iter().all(|t| t.is_finite()));
        let compact_valued = closed_valued && bounded_valued;
        let row = ImplicationRow {
            x: x.clone(),
            osc: check_osc(op, x, OSC_TOL)?.holds,
            usc: check_usc(op, x, &USC_EPS)?.holds,
            locally_bounded: check_local_bounded(op, x, &LB_RADII)?.holds,
            closed_valued,
            bounded_valued,
            compact_valued,
            graph_closed_ambient: check_osc(&ambient, x, OSC_TOL)?.holds,
        };
        let mut arrow = |ok: bool, name: &str| {
            if !ok {
                violations.push(format!("{name} fails at {x:?}"));
            }
        };
        arrow(!row.usc || row.bounded_valued == row.locally_bounded, "usc: bounded-valued <=> locally bounded");
        arrow(!(row.usc && row.closed_valued) || row.osc, "usc & closed-valued => osc");
        arrow(!row.graph_closed_ambient || row.osc, "graph closed in X x R^n => osc");
        arrow(
            (row.usc && row.compact_valued) == (row.locally_bounded && row.graph_closed_ambient),
            "usc & compact-valued <=> locally bounded & graph closed in X x R^n",
        );
        if target_closed {
            arrow(!row.osc || row.graph_closed_ambient, "osc => graph closed (closed target)");
            arrow(
                !(row.osc && row.locally_bounded) || (row.usc && row.compact_valued),
                "osc & locally bounded => usc & compact-valued (closed target)",
            );
        }
        rows.push(row);
    }
    Ok(ImplicationReport { operator: op.label.clone(), target_closed, rows, violations, caveat: CAVEAT })
}

/// Operators of the worked examples.
pub mod catalog {
    use super::*;

    fn unit(lo_closed: bool, hi_closed: bool) -> Domain {
        Domain::interval(Interval::new(0.0, 1.0, lo_closed, hi_closed))
    }

    fn x_or_half(x: &[f64]) -> Vec<Point> {
        if x[0] > 0.0 {
            vec![vec![x[0]]]
        } else {
            vec![vec![0.5]]
        }
    }

    /// `T(x) = {x}` for `x > 0`, `T(0) = {½}`, into `(0, 1]`.
    pub fn osc_target_t1() -> SampledOperator {
        SampledOperator::new("T1 [0,1] -> (0,1]", unit(true, true), unit(false, true), x_or_half)
    }

    /// The same graph, into `[0, 1]`.
    pub fn osc_target_t2() -> SampledOperator {
        SampledOperator::new("T2 [0,1] -> [0,1]", unit(true, true), unit(true, true), x_or_half)
    }

    /// `T(x) = {1/x}` on `(0, 1)`.
    pub fn reciprocal_t1() -> SampledOperator {
        SampledOperator::new("T1 (0,1) -> R, 1/x", unit(false, false), Domain::real_space(1), |x| vec![vec![1.0 / x[0]]])
    }

    /// `T(x) = {1/x}` on `(0, 1)` and `T(0) = A` for a finite (compact) `A`.
    pub fn reciprocal_t2(a: Vec<f64>) -> SampledOperator {
        SampledOperator::new("T2 [0,1) -> R, 1/x, T(0) = A", unit(true, false), Domain::real_space(1), move |x| {
            if x[0] == 0.0 {
                a.iter().map(|&t| vec![t]).collect()
            } else {
                vec![vec![1.0 / x[0]]]
            }
        })
    }

    /// `T(x) = {x}` on `[0, 1]`, usc and compact-valued into a closed target.
    pub fn identity_closed() -> SampledOperator {
        SampledOperator::new("id [0,1] -> [0,1]", unit(true, true), unit(true, true), |x| vec![x.to_vec()])
    }

    /// Empty on `[0, ½)`, `{x}` beyond; usc at every point left of ½.
    pub fn empty_near_origin() -> SampledOperator {
        SampledOperator::new("empty on [0,1/2)", unit(true, true), unit(true, true), |x| {
            if x[0] < 0.5 {
                Vec::new()
            } else {
                vec![x.to_vec()]
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::catalog::*;
    use super::*;

    #[test]
    fn role_of_the_target_space() {
        let t1 = osc_target_t1();
        let t2 = osc_target_t2();
        assert!(check_osc(&t1, &[0.0], OSC_TOL).unwrap().holds);
        let v = check_osc(&t2, &[0.0], OSC_TOL).unwrap();
        assert!(!v.holds);
        assert!(v.witness.unwrap().contains("[0.0]"));
        assert!(!check_usc(&t1, &[0.0], &USC_EPS).unwrap().holds);
        assert!(check_local_bounded(&t1, &[0.0], &LB_RADII).unwrap().holds);
    }

    #[test]
    fn local_boundedness_matters() {
        let t1 = reciprocal_t1();
        let t2 = reciprocal_t2(vec![0.0]);
        assert!(check_local_bounded(&t1, &[0.5], &LB_RADII).unwrap().holds);
        assert!(check_usc(&t1, &[0.5], &USC_EPS).unwrap().holds);
        assert!(check_osc(&t1, &[0.5], OSC_TOL).unwrap().holds);
        assert!(!check_local_bounded(&t2, &[0.0], &LB_RADII).unwrap().holds);
        assert!(!check_usc(&t2, &[0.0], &USC_EPS).unwrap().holds);
        assert!(check_osc(&t2, &[0.0], OSC_TOL).unwrap().holds);
    }

    #[test]
    fn source_precondition() {
        assert!(check_osc(&reciprocal_t1(), &[0.0], OSC_TOL).is_err());
    }

    #[test]
    fn empty_values_near_a_point_are_usc() {
        let op = empty_near_origin();
        assert!(check_usc(&op, &[0.2], &USC_EPS).unwrap().holds);
        // nonempty only to the right, and continuous there
        assert!(check_usc(&op, &[0.5], &USC_EPS).unwrap().holds);
    }

    #[test]
    fn no_arrow_is_violated_on_the_catalog() {
        let probes = |xs: &[f64]| xs.iter().map(|&x| vec![x]).collect::<Vec<_>>();
        let ops = [
            (osc_target_t1(), probes(&[0.0, 0.3, 1.0])),
            (osc_target_t2(), probes(&[0.0, 0.3, 1.0])),
            (reciprocal_t1(), probes(&[0.1, 0.5, 0.9])),
            (reciprocal_t2(vec![0.0, 2.0]), probes(&[0.0, 0.5])),
            (identity_closed(), probes(&[0.0, 0.5, 1.0])),
            (empty_near_origin(), probes(&[0.0, 0.25, 0.75])),
        ];
        for (op, pts) in ops {
            let r = implication_matrix(&op, &pts).unwrap();
            assert!(r.violations.is_empty(), "{}: {:?}", op.label, r.violations);
        }
        let r = implication_matrix(&osc_target_t1(), &probes(&[0.0])).unwrap();
        let row = &r.rows[0];
        assert!(row.osc && row.compact_valued && row.locally_bounded && !row.usc && !r.target_closed);
        let r = implication_matrix(&identity_closed(), &probes(&[0.5])).unwrap();
        assert!(r.rows[0].usc && r.rows[0].osc && r.rows[0].locally_bounded);
    }
}
