use std::fmt;
use std::sync::Arc;

use super::domain::{Domain, Point};
use super::extreal::ExtReal;

/// Which argument of the Bregman distance a function is paired with.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// Defined on `X = dom κ`, enters `f + D(·, ȳ)/λ`.
    Left,
    /// Defined on `Y = int dom κ`, enters `g + D(x̄, ·)/λ`.
    Right,
}

pub type ValueFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
pub type GradFn = Arc<dyn Fn(&[f64]) -> Point + Send + Sync>;

/// An extended-real-valued function on a declared domain, extended by `+∞`
/// outside of it.
#[derive(Clone)]
pub struct ObjectiveFn {
    pub domain: Domain,
    pub side: Side,
    pub label: String,
    value: ValueFn,
    grad: Option<GradFn>,
}

impl ObjectiveFn {
    pub fn new(
        label: impl Into<String>,
        domain: Domain,
        side: Side,
        value: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        ObjectiveFn { domain, side, label: label.into(), value: Arc::new(value), grad: None }
    }

    pub fn with_grad(mut self, grad: impl Fn(&[f64]) -> Point + Send + Sync + 'static) -> Self {
        self.grad = Some(Arc::new(grad));
        self
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    /// The canonical extension: `+∞` off the declared domain.
    pub fn eval(&self, x: &[f64]) -> ExtReal {
        if !self.domain.contains(x) {
            return ExtReal::POS_INF;
        }
        ExtReal::from_eval((self.value)(x))
    }

    /// Analytic gradient, only at interior points of the domain.
    pub fn grad(&self, x: &[f64]) -> Option<Point> {
        if !self.domain.contains_interior(x) {
            return None;
        }
        self.grad.as_ref().map(|g| g(x))
    }

    pub fn has_grad(&self) -> bool {
        self.grad.is_some()
    }

    /// Same formula on a different side/domain.
    pub fn relabel(&self, side: Side, domain: Domain) -> Self {
        ObjectiveFn { domain, side, ..self.clone() }
    }
}

impl fmt::Debug for ObjectiveFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ObjectiveFn")
            .field("label", &self.label)
            .field("side", &self.side)
            .field("domain", &self.domain)
            .finish()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProxStatus {
    Nonempty,
    EmptyInfNotAttained,
    UnboundedBelow,
    AllInfinite,
}

impl ProxStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            ProxStatus::Nonempty => "nonempty",
            ProxStatus::EmptyInfNotAttained => "empty_inf_not_attained",
            ProxStatus::UnboundedBelow => "unbounded_below",
            ProxStatus::AllInfinite => "all_infinite",
        }
    }
}

impl fmt::Display for ProxStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Solution set of a parametric minimization.
#[derive(Clone, Debug)]
pub struct ProxResult {
    pub inf_value: ExtReal,
    /// Approximate minimizers, merged within the cluster tolerance.
    pub minimizers: Vec<Point>,
    pub status: ProxStatus,
    /// Free-form audit trail, e.g. the escape sequence for `UnboundedBelow`.
    pub certificate: String,
}

impl ProxResult {
    pub fn all_infinite() -> Self {
        ProxResult {
            inf_value: ExtReal::POS_INF,
            minimizers: Vec::new(),
            status: ProxStatus::AllInfinite,
            certificate: "objective is +inf on every probe".into(),
        }
    }

    pub fn unbounded(certificate: String) -> Self {
        ProxResult {
            inf_value: ExtReal::NEG_INF,
            minimizers: Vec::new(),
            status: ProxStatus::UnboundedBelow,
            certificate,
        }
    }

    pub fn is_nonempty(&self) -> bool {
        self.status == ProxStatus::Nonempty
    }
}

/// Tolerances and budgets shared by the numerical solvers.
#[derive(Clone, Debug)]
pub struct SolverOpts {
    pub tol_1d: f64,
    pub tol_nd: f64,
    /// Minimizers closer than this (and values within it) are merged.
    pub cluster_tol: f64,
    /// Values below `-escape` certify unboundedness.
    pub escape: f64,
    /// Smallest distance used when approaching an open boundary.
    pub margin_floor: f64,
    pub seed: u64,
    pub n_starts: usize,
    pub scan_points: usize,
}

impl Default for SolverOpts {
    fn default() -> Self {
        SolverOpts {
            tol_1d: 1e-9,
            tol_nd: 1e-7,
            cluster_tol: 1e-6,
            escape: 1e12,
            margin_floor: 1e-12,
            seed: 0,
            n_starts: 12,
            scan_points: 400,
        }
    }
}
