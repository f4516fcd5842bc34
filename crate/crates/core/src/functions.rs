//! Catalog of objective functions referenced by name.

use crate::error::{Error, Result};
use crate::kernels::Kernel;
use crate::numerics::{Domain, Interval, ObjectiveFn, Side};

pub const CATALOG: [&str; 11] = [
    "zero",
    "ln",
    "id",
    "linear",
    "sq",
    "half_sq",
    "neg_sq",
    "inv",
    "indicator",
    "dragomir_f",
    "double_well",
];

/// Splits `name[:p1,p2,...]` into the name and its numeric parameters.
pub fn split_spec(spec: &str) -> Result<(&str, Vec<f64>)> {
    let (name, rest) = match spec.split_once(':') {
        Some((n, r)) => (n, Some(r)),
        None => (spec, None),
    };
    let params = match rest {
        None => Vec::new(),
        Some(r) => r
            .split(',')
            .map(|t| t.trim().parse::<f64>().map_err(|_| Error::InvalidArgument(format!("bad parameter `{t}` in `{spec}`"))))
            .collect::<Result<Vec<_>>>()?,
    };
    if params.iter().any(|p| !p.is_finite()) {
        return Err(Error::InvalidArgument(format!("non-finite parameter in `{spec}`")));
    }
    Ok((name.trim(), params))
}

fn sq_norm(x: &[f64]) -> f64 {
    x.iter().map(|t| t * t).sum()
}

/// Builds the named function on the kernel's natural set: `X` for left
/// functions, `Y = int X` for right functions.
pub fn make_function(name: &str, params: &[f64], k: &Kernel, side: Side) -> Result<ObjectiveFn> {
    let n = k.dim();
    let natural = match side {
        Side::Left => k.domain.clone(),
        Side::Right => k.domain.interior(),
    };
    let restrict = |d: Domain| natural.intersect(&d);
    let positive = || -> Result<Domain> {
        if n != 1 {
            return Err(Error::InvalidArgument(format!("`{name}` is one-dimensional")));
        }
        restrict(Domain::interval(Interval::open(0.0, f64::INFINITY)))
    };
    let f = match name {
        "zero" => ObjectiveFn::new("zero", natural, side, |_| 0.0).with_grad(move |x| vec![0.0; x.len()]),
        "ln" => ObjectiveFn::new("ln", positive()?, side, |x| x[0].ln()).with_grad(|x| vec![1.0 / x[0]]),
        "inv" => ObjectiveFn::new("inv", positive()?, side, |x| 1.0 / x[0]).with_grad(|x| vec![-1.0 / (x[0] * x[0])]),
        "id" => {
            if n != 1 {
                return Err(Error::InvalidArgument("`id` is one-dimensional; use `linear`".into()));
            }
            ObjectiveFn::new("id", natural, side, |x| x[0]).with_grad(|_| vec![1.0])
        }
        "linear" => {
            if params.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: params.len() });
            }
            let c = params.to_vec();
            let c2 = c.clone();
            ObjectiveFn::new("linear", natural, side, move |x| x.iter().zip(&c).map(|(a, b)| a * b).sum())
                .with_grad(move |_| c2.clone())
        }
        "sq" => ObjectiveFn::new("sq", natural, side, sq_norm).with_grad(|x| x.iter().map(|t| 2.0 * t).collect()),
        "half_sq" => ObjectiveFn::new("half_sq", natural, side, |x| 0.5 * sq_norm(x)).with_grad(|x| x.to_vec()),
        "neg_sq" => ObjectiveFn::new("neg_sq", natural, side, |x| -sq_norm(x)).with_grad(|x| x.iter().map(|t| -2.0 * t).collect()),
        "double_well" => {
            if n != 1 {
                return Err(Error::InvalidArgument("`double_well` is one-dimensional".into()));
            }
            ObjectiveFn::new("double_well", natural, side, |x| (x[0] * x[0] - 1.0).powi(2))
                .with_grad(|x| vec![4.0 * x[0] * (x[0] * x[0] - 1.0)])
        }
        "indicator" => {
            let p = if params.is_empty() { vec![0.0; n] } else { params.to_vec() };
            if p.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: p.len() });
            }
            let label = format!("indicator:{}", p.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(","));
            ObjectiveFn::new(label, restrict(Domain::point(p))?, side, |_| 0.0)
        }
        "dragomir_f" => {
            if n != 2 {
                return Err(Error::InvalidArgument("`dragomir_f` is two-dimensional".into()));
            }
            let d = restrict(Domain::Box(vec![Interval::real_line(), Interval::open(0.0, f64::INFINITY)]))?;
            ObjectiveFn::new("dragomir_f", d, side, |x| x[0] * x[0] / (4.0 * x[1]))
                .with_grad(|x| vec![x[0] / (2.0 * x[1]), -x[0] * x[0] / (4.0 * x[1] * x[1])])
        }
        other => return Err(Error::UnknownFunction(other.to_string())),
    };
    Ok(f)
}

/// Parses `name[:params]` for the given kernel and side.
pub fn parse_function(spec: &str, k: &Kernel, side: Side) -> Result<ObjectiveFn> {
    let (name, params) = split_spec(spec)?;
    make_function(name, &params, k, side)
}
