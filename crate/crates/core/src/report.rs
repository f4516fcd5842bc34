//! Pass/fail entries shared by the probes.

use std::fmt;

use crate::numerics::{dist_inf, Point};

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: &'static str, pass: bool, detail: impl Into<String>) -> Self {
        Check { name, pass, detail: detail.into() }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}: {}", if self.pass { "PASS" } else { "FAIL" }, self.name, self.detail)
    }
}

/// A probe's findings. Preconditions are reported, never enforced: probes
/// on kernels that miss a hypothesis are how the counterexamples show up.
#[derive(Clone, Debug, Default)]
pub struct ProbeReport {
    pub preconditions: Vec<Check>,
    pub checks: Vec<Check>,
}

impl ProbeReport {
    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().chain(&self.preconditions).find(|c| c.name == name)
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Hausdorff distance (sup-norm) between finite sets; `∞` if exactly one is empty.
pub fn hausdorff(a: &[Point], b: &[Point]) -> f64 {
    if a.is_empty() && b.is_empty() {
        return 0.0;
    }
    let one_way = |p: &[Point], q: &[Point]| {
        p.iter()
            .map(|x| q.iter().map(|y| dist_inf(x, y)).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    one_way(a, b).max(one_way(b, a))
}
