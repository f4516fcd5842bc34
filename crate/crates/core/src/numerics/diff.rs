use super::domain::{Domain, Point};
use super::objective::ObjectiveFn;
use crate::error::{Error, Result};

/// Central-difference gradient. Every stencil point must be interior.
pub fn finite_diff_grad(f: &ObjectiveFn, x: &[f64], h: f64) -> Result<Point> {
    if x.len() != f.dim() {
        return Err(Error::DimensionMismatch { expected: f.dim(), got: x.len() });
    }
    if !(h > 0.0) {
        return Err(Error::InvalidArgument(format!("step h = {h} must be positive")));
    }
    if let Some(c) = violating_coordinate(&f.domain, x, h) {
        return Err(Error::StencilOutsideDomain { coordinate: c });
    }
    let mut g = Vec::with_capacity(x.len());
    let mut p = x.to_vec();
    for i in 0..x.len() {
        p[i] = x[i] + h;
        let fp = f.eval(&p).to_f64();
        p[i] = x[i] - h;
        let fm = f.eval(&p).to_f64();
        p[i] = x[i];
        g.push((fp - fm) / (2.0 * h));
    }
    Ok(g)
}

fn violating_coordinate(d: &Domain, x: &[f64], h: f64) -> Option<usize> {
    match d {
        Domain::Box(ivs) => ivs.iter().zip(x).position(|(iv, &t)| !(iv.margin(t) > h)),
        Domain::Points { .. } => Some(0),
    }
}
