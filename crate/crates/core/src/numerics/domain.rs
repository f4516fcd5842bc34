//! Convex sets of ℝⁿ described by membership and interior predicates.

use crate::error::{Error, Result};

pub type Point = Vec<f64>;

/// A real interval; infinite endpoints are always open.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Interval {
    pub fn new(lo: f64, hi: f64, lo_closed: bool, hi_closed: bool) -> Self {
        Interval {
            lo,
            hi,
            lo_closed: lo_closed && lo.is_finite(),
            hi_closed: hi_closed && hi.is_finite(),
        }
    }

    pub fn real_line() -> Self {
        Self::new(f64::NEG_INFINITY, f64::INFINITY, false, false)
    }

    pub fn open(lo: f64, hi: f64) -> Self {
        Self::new(lo, hi, false, false)
    }

    pub fn closed(lo: f64, hi: f64) -> Self {
        Self::new(lo, hi, true, true)
    }

    pub fn contains(&self, t: f64) -> bool {
        if t.is_nan() {
            return false;
        }
        let above = if self.lo_closed { t >= self.lo } else { t > self.lo };
        let below = if self.hi_closed { t <= self.hi } else { t < self.hi };
        above && below
    }

    pub fn contains_interior(&self, t: f64) -> bool {
        t > self.lo && t < self.hi
    }

    pub fn margin(&self, t: f64) -> f64 {
        if !self.contains_interior(t) {
            return 0.0;
        }
        (t - self.lo).min(self.hi - t)
    }

    pub fn interior(&self) -> Interval {
        Interval::open(self.lo, self.hi)
    }

    pub fn intersect(&self, other: &Interval) -> Interval {
        let (lo, lo_closed) = if self.lo > other.lo {
            (self.lo, self.lo_closed)
        } else if other.lo > self.lo {
            (other.lo, other.lo_closed)
        } else {
            (self.lo, self.lo_closed && other.lo_closed)
        };
        let (hi, hi_closed) = if self.hi < other.hi {
            (self.hi, self.hi_closed)
        } else if other.hi < self.hi {
            (other.hi, other.hi_closed)
        } else {
            (self.hi, self.hi_closed && other.hi_closed)
        };
        Interval::new(lo, hi, lo_closed, hi_closed)
    }

    /// Whether the interval has nonempty interior.
    pub fn is_solid(&self) -> bool {
        self.lo < self.hi
    }

    fn representative(&self) -> f64 {
        match (self.lo.is_finite(), self.hi.is_finite()) {
            (true, true) => 0.5 * (self.lo + self.hi),
            (true, false) => self.lo + 1.0,
            (false, true) => self.hi - 1.0,
            (false, false) => 0.0,
        }
    }
}

/// Descriptor of a convex set `X ⊆ ℝⁿ`.
///
/// `Points` is a finite set (convex only when it has a single element, but
/// finite sets are how indicator-of-a-point functions and grids enter the
/// solvers); its interior in ℝⁿ is empty.
#[derive(Clone, Debug, PartialEq)]
pub enum Domain {
    Box(Vec<Interval>),
    Points { dim: usize, points: Vec<Point> },
}

impl Domain {
    pub fn real_space(dim: usize) -> Self {
        Domain::Box(vec![Interval::real_line(); dim])
    }

    pub fn interval(iv: Interval) -> Self {
        Domain::Box(vec![iv])
    }

    pub fn point(p: Point) -> Self {
        Domain::Points { dim: p.len(), points: vec![p] }
    }

    pub fn points(dim: usize, points: Vec<Point>) -> Self {
        Domain::Points { dim, points }
    }

    pub fn dim(&self) -> usize {
        match self {
            Domain::Box(ivs) => ivs.len(),
            Domain::Points { dim, .. } => *dim,
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        if x.len() != self.dim() {
            return false;
        }
        match self {
            Domain::Box(ivs) => ivs.iter().zip(x).all(|(iv, &t)| iv.contains(t)),
            Domain::Points { points, .. } => points.iter().any(|p| p.as_slice() == x),
        }
    }

    pub fn contains_interior(&self, x: &[f64]) -> bool {
        self.interior_margin(x) > 0.0
    }

    /// Distance from `x` to the complement of the interior (sup-norm);
    /// `+∞` for points of ℝⁿ itself, 0 off the interior.
    pub fn interior_margin(&self, x: &[f64]) -> f64 {
        if x.len() != self.dim() {
            return 0.0;
        }
        match self {
            Domain::Box(ivs) => ivs
                .iter()
                .zip(x)
                .map(|(iv, &t)| iv.margin(t))
                .fold(f64::INFINITY, f64::min),
            Domain::Points { .. } => 0.0,
        }
    }

    pub fn representative_interior_point(&self) -> Option<Point> {
        match self {
            Domain::Box(ivs) if ivs.iter().all(Interval::is_solid) => {
                Some(ivs.iter().map(Interval::representative).collect())
            }
            _ => None,
        }
    }

    /// The interior as a descriptor of its own.
    pub fn interior(&self) -> Domain {
        match self {
            Domain::Box(ivs) => Domain::Box(ivs.iter().map(Interval::interior).collect()),
            Domain::Points { dim, .. } => Domain::Points { dim: *dim, points: Vec::new() },
        }
    }

    pub fn intersect(&self, other: &Domain) -> Result<Domain> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: other.dim() });
        }
        Ok(match (self, other) {
            (Domain::Box(a), Domain::Box(b)) => {
                Domain::Box(a.iter().zip(b).map(|(p, q)| p.intersect(q)).collect())
            }
            (Domain::Points { dim, points }, d) | (d, Domain::Points { dim, points }) => {
                Domain::Points {
                    dim: *dim,
                    points: points.iter().filter(|p| d.contains(p)).cloned().collect(),
                }
            }
        })
    }

    /// The single interval of a one-dimensional box.
    pub fn as_interval(&self) -> Option<Interval> {
        match self {
            Domain::Box(ivs) if ivs.len() == 1 => Some(ivs[0]),
            _ => None,
        }
    }

    /// Moves coordinates lying within `tol` of a finite box face onto it.
    /// Used to recognise numerically estimated limits that sit on ∂X.
    pub fn snap_to_boundary(&self, x: &[f64], tol: f64) -> Point {
        match self {
            Domain::Box(ivs) => ivs
                .iter()
                .zip(x)
                .map(|(iv, &t)| {
                    if iv.lo.is_finite() && (t - iv.lo).abs() <= tol {
                        iv.lo
                    } else if iv.hi.is_finite() && (t - iv.hi).abs() <= tol {
                        iv.hi
                    } else {
                        t
                    }
                })
                .collect(),
            Domain::Points { .. } => x.to_vec(),
        }
    }

    /// Whether the set is closed in ℝⁿ.
    pub fn is_closed(&self) -> bool {
        match self {
            Domain::Box(ivs) => ivs.iter().all(|iv| {
                (iv.lo_closed || iv.lo == f64::NEG_INFINITY)
                    && (iv.hi_closed || iv.hi == f64::INFINITY)
            }),
            Domain::Points { .. } => true,
        }
    }

    pub fn is_full_space(&self) -> bool {
        match self {
            Domain::Box(ivs) => ivs
                .iter()
                .all(|iv| iv.lo == f64::NEG_INFINITY && iv.hi == f64::INFINITY),
            Domain::Points { .. } => false,
        }
    }

    /// Deterministic sample of interior points: per axis a few values
    /// spread over the interval, geometric towards finite faces.
    pub fn interior_samples(&self, per_axis: usize) -> Vec<Point> {
        let ivs = match self {
            Domain::Box(ivs) => ivs,
            Domain::Points { .. } => return Vec::new(),
        };
        let axes: Vec<Vec<f64>> = ivs.iter().map(|iv| axis_samples(iv, per_axis)).collect();
        cartesian(&axes)
    }
}

fn axis_samples(iv: &Interval, n: usize) -> Vec<f64> {
    let n = n.max(2);
    (0..n)
        .map(|i| {
            let s = (i as f64 + 0.5) / n as f64;
            match (iv.lo.is_finite(), iv.hi.is_finite()) {
                (true, true) => iv.lo + (iv.hi - iv.lo) * s,
                (true, false) => iv.lo + 10f64.powf(-2.0 + 4.0 * s),
                (false, true) => iv.hi - 10f64.powf(-2.0 + 4.0 * s),
                (false, false) => 6.0 * (s - 0.5),
            }
        })
        .collect()
}

pub(crate) fn cartesian(axes: &[Vec<f64>]) -> Vec<Point> {
    let mut out: Vec<Point> = vec![Vec::new()];
    for axis in axes {
        out = out
            .into_iter()
            .flat_map(|p| {
                axis.iter().map(move |&t| {
                    let mut q = p.clone();
                    q.push(t);
                    q
                })
            })
            .collect();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_line_interior() {
        let d = Domain::interval(Interval::new(0.0, f64::INFINITY, true, false));
        assert!(d.contains(&[0.0]));
        assert!(!d.contains_interior(&[0.0]));
        assert_eq!(d.interior_margin(&[2.5]), 2.5);
        assert_eq!(d.representative_interior_point(), Some(vec![1.0]));
        assert!(d.is_closed());
        assert!(!d.interior().is_closed());
    }

    #[test]
    fn points_have_empty_interior() {
        let d = Domain::point(vec![0.3]);
        assert!(d.contains(&[0.3]));
        assert!(!d.contains_interior(&[0.3]));
        assert!(d.representative_interior_point().is_none());
        let x = Domain::interval(Interval::closed(-1.0, 1.0));
        assert_eq!(d.intersect(&x).unwrap(), d);
        let far = Domain::point(vec![3.0]).intersect(&x).unwrap();
        assert!(!far.contains(&[3.0]));
    }

    #[test]
    fn intersection_keeps_the_tighter_end() {
        let a = Interval::new(0.0, 2.0, true, false);
        let b = Interval::new(-1.0, 2.0, false, true);
        let c = a.intersect(&b);
        assert!(c.lo_closed && !c.hi_closed);
        assert_eq!((c.lo, c.hi), (0.0, 2.0));
    }

    #[test]
    fn snapping() {
        let d = Domain::interval(Interval::new(0.0, 1.0, false, true));
        assert_eq!(d.snap_to_boundary(&[3e-7], 1e-6), vec![0.0]);
        assert!(!d.contains(&d.snap_to_boundary(&[3e-7], 1e-6)));
        assert_eq!(d.snap_to_boundary(&[0.5], 1e-6), vec![0.5]);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn domains() -> Vec<Domain> {
            vec![
                Domain::real_space(2),
                Domain::interval(Interval::open(0.0, f64::INFINITY)),
                Domain::interval(Interval::closed(-1.0, 1.0)),
                Domain::Box(vec![Interval::real_line(), Interval::open(0.0, f64::INFINITY)]),
            ]
        }

        proptest! {
            #[test]
            fn interior_predicates_agree(a in -5.0f64..5.0, b in -5.0f64..5.0, c in -5.0f64..5.0, d in -5.0f64..5.0) {
                for dom in domains() {
                    let (x, y): (Point, Point) = if dom.dim() == 1 { (vec![a], vec![c]) } else { (vec![a, b], vec![c, d]) };
                    if dom.contains_interior(&x) {
                        prop_assert!(dom.contains(&x));
                    }
                    prop_assert_eq!(dom.interior_margin(&x) > 0.0, dom.contains_interior(&x));
                    // convexity spot check
                    if dom.contains(&x) && dom.contains(&y) {
                        let m: Point = x.iter().zip(&y).map(|(p, q)| 0.5 * (p + q)).collect();
                        prop_assert!(dom.contains(&m));
                    }
                }
            }
        }
    }
}
