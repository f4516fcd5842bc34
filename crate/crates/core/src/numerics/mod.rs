//! Extended reals, domains, minimizers and numeric conjugates.

pub mod conjugate;
pub mod diff;
pub mod domain;
pub mod extreal;
pub mod nd;
pub mod objective;
pub mod scalar;

pub use conjugate::{grid_biconjugate, numeric_conjugate, GridFn};
pub use diff::finite_diff_grad;
pub use domain::{Domain, Interval, Point};
pub use extreal::ExtReal;
pub use nd::{minimize_nd, minimize_over};
pub use objective::{ObjectiveFn, ProxResult, ProxStatus, Side, SolverOpts};
pub use scalar::minimize_scalar;

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn sub(a: &[f64], b: &[f64]) -> Point {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub(crate) fn dist_inf(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
