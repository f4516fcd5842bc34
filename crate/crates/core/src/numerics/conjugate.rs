//! Numeric Legendre–Fenchel transforms.

use super::domain::{Domain, Point};
use super::extreal::ExtReal;
use super::nd::minimize_over;
use super::objective::{ObjectiveFn, ProxStatus, SolverOpts};
use crate::error::{Error, Result};

/// `f*(ξ) = sup_x ⟨x, ξ⟩ − f(x)`, the supremum restricted to `search` when
/// given (the result is then a lower bound of the true conjugate).
pub fn numeric_conjugate(f: &ObjectiveFn, xi: &[f64], search: Option<&Domain>, opts: &SolverOpts) -> Result<ExtReal> {
    if xi.len() != f.dim() {
        return Err(Error::DimensionMismatch { expected: f.dim(), got: xi.len() });
    }
    let dom = match search {
        Some(s) => f.domain.intersect(s)?,
        None => f.domain.clone(),
    };
    let obj = |x: &[f64]| {
        let v = f.eval(x);
        let lin: f64 = x.iter().zip(xi).map(|(a, b)| a * b).sum();
        v.add_real(-lin)
    };
    let r = minimize_over(&obj, &dom, opts)?;
    Ok(match r.status {
        ProxStatus::UnboundedBelow => ExtReal::POS_INF,
        ProxStatus::AllInfinite => ExtReal::NEG_INF,
        _ => -r.inf_value,
    })
}

/// A function sampled on finitely many points.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFn {
    pub points: Vec<Point>,
    pub values: Vec<ExtReal>,
}

impl GridFn {
    pub fn new(points: Vec<Point>, values: Vec<ExtReal>) -> Result<Self> {
        if points.len() != values.len() {
            return Err(Error::DimensionMismatch { expected: points.len(), got: values.len() });
        }
        for i in 0..points.len() {
            for j in 0..i {
                if points[i] == points[j] {
                    return Err(Error::InvalidArgument(format!("duplicate grid point {:?}", points[i])));
                }
            }
        }
        Ok(GridFn { points, values })
    }

    pub fn from_1d(xs: &[f64], values: Vec<ExtReal>) -> Result<Self> {
        Self::new(xs.iter().map(|&x| vec![x]).collect(), values)
    }
}

/// Twice-conjugated grid function (conjugate slopes range over all of ℝ):
/// the lower convex envelope of the finite samples, read back on the grid.
///
/// The envelope is assembled with a monotone-chain hull whose turn test has a
/// small relative slack, so points already on a hull edge are never promoted
/// to vertices; together with `min(input, envelope)` this makes the map
/// exactly idempotent. One-dimensional grids only.
pub fn grid_biconjugate(f: &GridFn) -> Result<GridFn> {
    if f.points.iter().any(|p| p.len() != 1) {
        return Err(Error::Unsupported("grid biconjugate is implemented for 1-D grids".into()));
    }
    if f.values.iter().any(|v| v.is_neg_inf()) {
        return Ok(GridFn { points: f.points.clone(), values: vec![ExtReal::NEG_INF; f.points.len()] });
    }
    let mut idx: Vec<usize> = (0..f.points.len()).filter(|&i| f.values[i].is_finite()).collect();
    if idx.is_empty() {
        return Err(Error::Improper("grid function is +inf everywhere"));
    }
    idx.sort_by(|&a, &b| f.points[a][0].total_cmp(&f.points[b][0]));
    let pt = |i: usize| (f.points[i][0], f.values[i].to_f64());

    let mut hull: Vec<usize> = Vec::with_capacity(idx.len());
    for &i in &idx {
        while hull.len() >= 2 {
            let (x0, y0) = pt(hull[hull.len() - 2]);
            let (x1, y1) = pt(hull[hull.len() - 1]);
            let (x2, y2) = pt(i);
            // middle point must lie strictly below the chord to survive
            let chord = y0 + (y2 - y0) * (x1 - x0) / (x2 - x0);
            let slack = 1e-12 * (1.0 + y0.abs().max(y1.abs()).max(y2.abs()));
            if y1 >= chord - slack {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(i);
    }

    let (xmin, xmax) = (pt(hull[0]).0, pt(*hull.last().unwrap()).0);
    let values = f
        .points
        .iter()
        .zip(&f.values)
        .map(|(p, &v)| {
            let x = p[0];
            if x < xmin || x > xmax {
                return ExtReal::POS_INF;
            }
            let k = hull.partition_point(|&h| pt(h).0 <= x);
            let env = if k == 0 {
                pt(hull[0]).1
            } else if k == hull.len() {
                pt(hull[k - 1]).1
            } else {
                let (x0, y0) = pt(hull[k - 1]);
                let (x1, y1) = pt(hull[k]);
                if x == x0 {
                    y0
                } else {
                    y0 + (y1 - y0) * (x - x0) / (x1 - x0)
                }
            };
            v.min(ExtReal::from_eval(env))
        })
        .collect();
    Ok(GridFn { points: f.points.clone(), values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::domain::Interval;
    use crate::numerics::objective::Side;

    fn e(v: f64) -> ExtReal {
        ExtReal::try_new(v).unwrap()
    }

    #[test]
    fn conjugate_of_half_square() {
        let f = ObjectiveFn::new("j", Domain::real_space(1), Side::Left, |x| 0.5 * x[0] * x[0]);
        let v = numeric_conjugate(&f, &[3.0], None, &SolverOpts::default()).unwrap();
        assert!((v.to_f64() - 4.5).abs() < 1e-9);
    }

    #[test]
    fn conjugate_of_exp() {
        let f = ObjectiveFn::new("exp", Domain::real_space(1), Side::Left, |x| x[0].exp());
        let v = numeric_conjugate(&f, &[1.0], None, &SolverOpts::default()).unwrap();
        assert!((v.to_f64() + 1.0).abs() < 1e-9);
        // ξ < 0: the supremum escapes along x → −∞
        let v = numeric_conjugate(&f, &[-1.0], None, &SolverOpts::default()).unwrap();
        assert!(v.is_pos_inf());
    }

    #[test]
    fn conjugate_of_origin_indicator() {
        let f = ObjectiveFn::new("iota0", Domain::point(vec![0.0]), Side::Left, |_| 0.0);
        for xi in [-3.0, 0.0, 7.0] {
            assert_eq!(numeric_conjugate(&f, &[xi], None, &SolverOpts::default()).unwrap(), ExtReal::ZERO);
        }
    }

    #[test]
    fn truncated_search_is_a_lower_bound() {
        let f = ObjectiveFn::new("lin", Domain::real_space(1), Side::Left, |x| 0.0 * x[0]);
        let b = Domain::interval(Interval::closed(-2.0, 2.0));
        let v = numeric_conjugate(&f, &[1.0], Some(&b), &SolverOpts::default()).unwrap();
        assert!((v.to_f64() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn three_point_biconjugate() {
        let g = GridFn::from_1d(&[0.0, 1.0, 2.0], vec![e(0.0), e(1.0), e(0.0)]).unwrap();
        let b = grid_biconjugate(&g).unwrap();
        assert_eq!(b.values, vec![e(0.0), e(0.0), e(0.0)]);
    }

    #[test]
    fn convex_grid_is_fixed() {
        let xs: Vec<f64> = (0..9).map(|i| i as f64 - 4.0).collect();
        let g = GridFn::from_1d(&xs, xs.iter().map(|x| e(x * x)).collect()).unwrap();
        assert_eq!(grid_biconjugate(&g).unwrap(), g);
    }

    #[test]
    fn single_finite_value() {
        let g = GridFn::from_1d(&[0.0, 1.0, 2.0], vec![ExtReal::POS_INF, e(3.5), ExtReal::POS_INF]).unwrap();
        let b = grid_biconjugate(&g).unwrap();
        assert_eq!(b.values[1], e(3.5));
        assert!(b.values[0].is_pos_inf() && b.values[2].is_pos_inf());
    }

    #[test]
    fn all_infinite_is_an_error() {
        let g = GridFn::from_1d(&[0.0, 1.0], vec![ExtReal::POS_INF; 2]).unwrap();
        assert!(grid_biconjugate(&g).is_err());
    }

    #[test]
    fn matches_brute_force_double_sup() {
        // independent oracle: sup over slopes of affine minorants through pairs
        let xs = [0.0, 0.5, 1.3, 2.0, 3.1, 4.0];
        let ys = [1.0, -0.2, 0.7, 0.1, 0.4, 2.0];
        let g = GridFn::from_1d(&xs, ys.iter().map(|&y| e(y)).collect()).unwrap();
        let b = grid_biconjugate(&g).unwrap();
        for (k, &x) in xs.iter().enumerate() {
            let mut best = ys[k];
            for i in 0..xs.len() {
                for j in 0..xs.len() {
                    if xs[i] <= x && x <= xs[j] && xs[i] < xs[j] {
                        let t = (x - xs[i]) / (xs[j] - xs[i]);
                        best = best.min((1.0 - t) * ys[i] + t * ys[j]);
                    }
                }
            }
            assert!((b.values[k].to_f64() - best).abs() < 1e-12, "at {x}");
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn biconjugate_is_idempotent_minorant(ys in proptest::collection::vec(-10.0f64..10.0, 2..40), holes in proptest::collection::vec(any::<bool>(), 40)) {
                let xs: Vec<f64> = (0..ys.len()).map(|i| i as f64 * 0.37 - 2.0).collect();
                let mut vals: Vec<ExtReal> = ys.iter().map(|&y| e(y)).collect();
                for (v, h) in vals.iter_mut().zip(&holes) {
                    if *h { *v = ExtReal::POS_INF; }
                }
                if vals.iter().all(|v| v.is_pos_inf()) { vals[0] = e(0.0); }
                let g = GridFn::from_1d(&xs, vals).unwrap();
                let b1 = grid_biconjugate(&g).unwrap();
                let b2 = grid_biconjugate(&b1).unwrap();
                prop_assert_eq!(&b1, &b2);
                for (a, b) in g.values.iter().zip(&b1.values) {
                    prop_assert!(b <= a);
                }
                // convex along consecutive finite triples
                let fin: Vec<(f64, f64)> = xs.iter().zip(&b1.values).filter(|(_, v)| v.is_finite()).map(|(x, v)| (*x, v.to_f64())).collect();
                for w in fin.windows(3) {
                    let (x0, y0) = w[0]; let (x1, y1) = w[1]; let (x2, y2) = w[2];
                    let chord = y0 + (y2 - y0) * (x1 - x0) / (x2 - x0);
                    prop_assert!(y1 <= chord + 1e-9);
                }
            }

            #[test]
            fn numeric_conjugate_is_convex_on_segments(a in -2.0f64..2.0, b in -2.0f64..2.0) {
                let f = ObjectiveFn::new("quartic", Domain::real_space(1), Side::Left, |x| x[0].powi(4) + x[0]);
                let opts = SolverOpts::default();
                let v1 = numeric_conjugate(&f, &[a], None, &opts).unwrap().to_f64();
                let v2 = numeric_conjugate(&f, &[b], None, &opts).unwrap().to_f64();
                for t in [0.25, 0.5, 0.75] {
                    let vm = numeric_conjugate(&f, &[t * a + (1.0 - t) * b], None, &opts).unwrap().to_f64();
                    prop_assert!(vm <= t * v1 + (1.0 - t) * v2 + 1e-6);
                }
            }
        }
    }
}
