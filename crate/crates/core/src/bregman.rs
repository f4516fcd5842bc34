//! Bregman distance and its companion forms.

use crate::error::{Error, Result};
use crate::kernels::Kernel;
use crate::numerics::{dot, sub, ExtReal};

/// A kernel together with a stepsize `λ > 0`.
#[derive(Clone, Debug)]
pub struct BregmanPair {
    pub kernel: Kernel,
    lambda: f64,
}

impl BregmanPair {
    pub fn new(kernel: Kernel, lambda: f64) -> Result<Self> {
        check_lambda(lambda)?;
        Ok(BregmanPair { kernel, lambda })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// `D(x, y)/λ`.
    pub fn scaled_distance(&self, x: &[f64], y: &[f64]) -> ExtReal {
        distance(&self.kernel, x, y).scale(1.0 / self.lambda)
    }
}

pub(crate) fn check_lambda(lambda: f64) -> Result<()> {
    if lambda > 0.0 && lambda.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("stepsize λ = {lambda} must be positive and finite")))
    }
}

/// `D(x, y) = κ(x) − κ(y) − ⟨∇κ(y), x − y⟩` for `y ∈ int X`, `+∞` otherwise.
///
/// Total: never fails and never forms `∞ − ∞`, since `κ(y)` and `∇κ(y)` are
/// finite on the interior. Tiny negative round-off is clipped to zero.
pub fn distance(k: &Kernel, x: &[f64], y: &[f64]) -> ExtReal {
    let g = match k.grad(y) {
        Some(g) => g,
        None => return ExtReal::POS_INF,
    };
    let kx = k.value(x);
    if kx.is_finite() {
        if let Some(d) = k.stable_distance(x, y) {
            return ExtReal::from_eval(d.max(0.0));
        }
    }
    let ky = k.value(y).to_f64();
    match kx.finite() {
        None => ExtReal::POS_INF,
        Some(kx) => {
            let d = kx - ky - dot(&g, &sub(x, y));
            ExtReal::from_eval(d.max(0.0))
        }
    }
}

/// `D_{κ*}(a, b)` with `b ∈ int dom κ*`.
pub fn conj_distance(k: &Kernel, a: &[f64], b: &[f64]) -> ExtReal {
    let g = match k.conj_grad(b) {
        Some(g) => g,
        None => return ExtReal::POS_INF,
    };
    match k.conj_value(a).finite() {
        None => ExtReal::POS_INF,
        Some(ka) => {
            let d = ka - k.conj_value(b).to_f64() - dot(&g, &sub(a, b));
            ExtReal::from_eval(d.max(0.0))
        }
    }
}

/// Fenchel-gap form `κ(x) + κ*(∇κ(y)) − ⟨∇κ(y), x⟩`, only for `y ∈ int X`.
pub fn gap_form(k: &Kernel, x: &[f64], y: &[f64]) -> Result<ExtReal> {
    let g = k.grad(y).ok_or_else(|| Error::ProxUndefined(y.to_vec()))?;
    let kx = k.value(x);
    Ok(match kx.finite() {
        None => ExtReal::POS_INF,
        Some(kx) => ExtReal::from_eval(kx + k.conj_value(&g).to_f64() - dot(&g, x)),
    })
}

/// `|D_κ(x, y) − D_{κ*}(∇κ(y), ∇κ(x))| ≤ tol`, relative to the magnitudes involved.
pub fn dual_identity_check(k: &Kernel, x: &[f64], y: &[f64], tol: f64) -> Result<bool> {
    if !k.flags.legendre {
        return Err(Error::KernelProperty { kernel: k.to_string(), property: "legendre" });
    }
    let gx = k.grad(x).ok_or_else(|| Error::OutsideDomain(x.to_vec()))?;
    let gy = k.grad(y).ok_or_else(|| Error::OutsideDomain(y.to_vec()))?;
    let lhs = distance(k, x, y).to_f64();
    let rhs = conj_distance(k, &gy, &gx).to_f64();
    let scale = 1.0 + k.value(x).to_f64().abs().max(k.value(y).to_f64().abs());
    Ok((lhs - rhs).abs() <= tol * scale)
}

/// Symmetrized distance `D(u, v) + D(v, u) = ⟨∇κ(u) − ∇κ(v), u − v⟩`.
pub fn symmetrized(k: &Kernel, u: &[f64], v: &[f64]) -> Result<ExtReal> {
    let gu = k.grad(u).ok_or_else(|| Error::OutsideDomain(u.to_vec()))?;
    let gv = k.grad(v).ok_or_else(|| Error::OutsideDomain(v.to_vec()))?;
    Ok(ExtReal::from_eval(dot(&sub(&gu, &gv), &sub(u, v))))
}
