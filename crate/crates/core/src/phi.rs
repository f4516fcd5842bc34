//! Generalized conjugacy over finite grids.
//!
//! A coupling `Φ: X × Y → ℝ` on finite point sets; every supremum is a
//! maximum over a finite set, so the engine has no tolerances. With integer
//! or rational scalars every identity holds exactly; with `f64` the maxima
//! are exact but `Φ − f` is rounded.

use std::fmt;
use std::ops::{Add, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::bregman::{check_lambda, distance};
use crate::error::{Error, Result};
use crate::kernels::Kernel;
use crate::numerics::Point;

/// Scalars the engine can work with: `i64`, `BigRational`, finite `f64`.
pub trait Scalar: Clone + PartialOrd + fmt::Debug + Add<Output = Self> + Sub<Output = Self> {}

impl<T: Clone + PartialOrd + fmt::Debug + Add<Output = T> + Sub<Output = T>> Scalar for T {}

/// Extended value over an arbitrary scalar.
#[derive(Clone, Debug, PartialEq)]
pub enum Ext<T> {
    NegInf,
    Finite(T),
    PosInf,
}

impl<T> Ext<T> {
    pub fn finite(&self) -> Option<&T> {
        match self {
            Ext::Finite(v) => Some(v),
            _ => None,
        }
    }
}

/// `Φ(xᵢ, yⱼ)` stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Coupling<T> {
    pub n_x: usize,
    pub n_y: usize,
    values: Vec<T>,
}

impl<T: Scalar> Coupling<T> {
    pub fn new(n_x: usize, n_y: usize, values: Vec<T>) -> Result<Self> {
        if n_x == 0 || n_y == 0 {
            return Err(Error::InvalidArgument("coupling needs points on both sides".into()));
        }
        if values.len() != n_x * n_y {
            return Err(Error::DimensionMismatch { expected: n_x * n_y, got: values.len() });
        }
        Ok(Coupling { n_x, n_y, values })
    }

    pub fn from_fn(n_x: usize, n_y: usize, phi: impl Fn(usize, usize) -> T) -> Result<Self> {
        let values = (0..n_x).flat_map(|i| (0..n_y).map(move |j| (i, j))).map(|(i, j)| phi(i, j)).collect();
        Self::new(n_x, n_y, values)
    }

    pub fn phi(&self, i: usize, j: usize) -> &T {
        &self.values[i * self.n_y + j]
    }

    /// `Φ'(y, x) = Φ(x, y)`.
    pub fn flipped(&self) -> Self {
        Coupling::from_fn(self.n_y, self.n_x, |j, i| self.phi(i, j).clone()).expect("same shape")
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Coupling<U> {
        Coupling { n_x: self.n_x, n_y: self.n_y, values: self.values.iter().map(f).collect() }
    }
}

fn check_proper<T>(f: &[Ext<T>], n: usize) -> Result<()> {
    if f.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: f.len() });
    }
    if f.iter().any(|v| matches!(v, Ext::NegInf)) {
        return Err(Error::Improper("takes the value -inf"));
    }
    if !f.iter().any(|v| matches!(v, Ext::Finite(_))) {
        return Err(Error::Improper("identically +inf"));
    }
    Ok(())
}

/// `f^Φ(y) = max_x Φ(x, y) − f(x)`, skipping `f(x) = +∞`.
pub fn phi_conjugate<T: Scalar>(c: &Coupling<T>, f: &[Ext<T>]) -> Result<Vec<Ext<T>>> {
    check_proper(f, c.n_x)?;
    Ok((0..c.n_y)
        .map(|j| {
            let mut best: Option<T> = None;
            for (i, v) in f.iter().enumerate() {
                if let Ext::Finite(fv) = v {
                    let cand = c.phi(i, j).clone() - fv.clone();
                    if best.as_ref().map_or(true, |b| cand > *b) {
                        best = Some(cand);
                    }
                }
            }
            best.map_or(Ext::NegInf, Ext::Finite)
        })
        .collect())
}

/// `f^{ΦΦ'} = (f^Φ)^{Φ'}`.
pub fn phi_biconjugate<T: Scalar>(c: &Coupling<T>, f: &[Ext<T>]) -> Result<Vec<Ext<T>>> {
    phi_conjugate(&c.flipped(), &phi_conjugate(c, f)?)
}

/// `∂_Φ f(xᵢ) = { yⱼ : xᵢ ∈ argmin_x f(x) − Φ(x, yⱼ) }`; empty when `f(xᵢ) = +∞`.
pub fn phi_subdiff<T: Scalar>(c: &Coupling<T>, f: &[Ext<T>], i: usize) -> Vec<usize> {
    let Some(fi) = f.get(i).and_then(Ext::finite) else { return Vec::new() };
    (0..c.n_y)
        .filter(|&j| {
            let here = fi.clone() - c.phi(i, j).clone();
            f.iter().enumerate().all(|(k, v)| match v {
                Ext::Finite(fk) => here <= fk.clone() - c.phi(k, j).clone(),
                Ext::PosInf => true,
                Ext::NegInf => false,
            })
        })
        .collect()
}

/// `argmin_x f(x) − Φ(x, yⱼ)`: with the Bregman coupling, the grid prox.
pub fn phi_argmin<T: Scalar>(c: &Coupling<T>, f: &[Ext<T>], j: usize) -> Vec<usize> {
    (0..c.n_x).filter(|&i| phi_subdiff(c, f, i).contains(&j)).collect()
}

/// The four statements of Fenchel Φ-duality at `(xᵢ, yⱼ)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DualityRecord {
    /// `yⱼ ∈ ∂_Φ f(xᵢ)`.
    pub a: bool,
    /// `xᵢ ∈ ∂_{Φ'} f^Φ(yⱼ)` and `∂_Φ f(xᵢ) ≠ ∅`.
    pub b: bool,
    /// `f(xᵢ) + f^Φ(yⱼ) = Φ(xᵢ, yⱼ)`.
    pub c: bool,
    /// `f(xᵢ) = f^{ΦΦ'}(xᵢ)` and `yⱼ ∈ ∂_Φ f^{ΦΦ'}(xᵢ)`.
    pub d: bool,
}

impl DualityRecord {
    pub fn consistent(&self) -> bool {
        self.a == self.b && self.b == self.c && self.c == self.d
    }
}

pub fn fy_duality_check<T: Scalar>(c: &Coupling<T>, f: &[Ext<T>], i: usize, j: usize) -> Result<DualityRecord> {
    check_proper(f, c.n_x)?;
    if i >= c.n_x || j >= c.n_y {
        return Err(Error::InvalidArgument(format!("index ({i}, {j}) outside a {}x{} coupling", c.n_x, c.n_y)));
    }
    let conj = phi_conjugate(c, f)?;
    let flipped = c.flipped();
    let biconj = phi_conjugate(&flipped, &conj)?;
    let sub = phi_subdiff(c, f, i);
    let a = sub.contains(&j);
    let b = phi_subdiff(&flipped, &conj, j).contains(&i) && !sub.is_empty();
    let cc = match (&f[i], &conj[j]) {
        (Ext::Finite(fi), Ext::Finite(gj)) => fi.clone() + gj.clone() == *c.phi(i, j),
        _ => false,
    };
    let d = f[i] == biconj[i] && phi_subdiff(c, &biconj, i).contains(&j);
    Ok(DualityRecord { a, b, c: cc, d })
}

/// `Φ(x, y) = −D(x, y)/λ` on `x_grid ⊂ X`, `y_grid ⊂ int X`.
pub fn bregman_coupling(k: &Kernel, lambda: f64, x_grid: &[Point], y_grid: &[Point]) -> Result<Coupling<f64>> {
    check_lambda(lambda)?;
    let mut values = Vec::with_capacity(x_grid.len() * y_grid.len());
    for x in x_grid {
        for y in y_grid {
            match distance(k, x, y).finite() {
                Some(d) => values.push(-d / lambda),
                None => return Err(Error::OutsideDomain(if k.domain.contains_interior(y) { x.clone() } else { y.clone() })),
            }
        }
    }
    Coupling::new(x_grid.len(), y_grid.len(), values)
}

/// Exact rational copy of a finite `f64` value.
pub fn to_rational(v: f64) -> Result<BigRational> {
    BigRational::from_float(v).ok_or(Error::NotANumber)
}

pub fn ext_to_rational(v: &Ext<f64>) -> Result<Ext<BigRational>> {
    Ok(match v {
        Ext::Finite(t) => Ext::Finite(to_rational(*t)?),
        Ext::PosInf => Ext::PosInf,
        Ext::NegInf => Ext::NegInf,
    })
}

/// Rational copy of an `f64` coupling, so identities can be checked exactly.
pub fn exact_coupling(c: &Coupling<f64>) -> Result<Coupling<BigRational>> {
    let values = c.values.iter().map(|&v| to_rational(v)).collect::<Result<Vec<_>>>()?;
    Coupling::new(c.n_x, c.n_y, values)
}

pub fn rational_from_int(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn fin(v: &[i64]) -> Vec<Ext<i64>> {
        v.iter().map(|&t| Ext::Finite(t)).collect()
    }

    fn inner() -> Coupling<i64> {
        let g = [-1i64, 0, 1];
        Coupling::from_fn(3, 3, |i, j| g[i] * g[j]).unwrap()
    }

    #[test]
    fn indicator_of_zero_has_zero_conjugate() {
        let f = vec![Ext::PosInf, Ext::Finite(0), Ext::PosInf];
        assert_eq!(phi_conjugate(&inner(), &f).unwrap(), fin(&[0, 0, 0]));
    }

    #[test]
    fn negative_square_coupling_of_zero() {
        // Φ = −(x−y)² (doubled to stay integral)
        let c = Coupling::from_fn(5, 5, |i, j| -((i as i64 - j as i64).pow(2))).unwrap();
        assert_eq!(phi_conjugate(&c, &fin(&[0; 5])).unwrap(), fin(&[0; 5]));
        assert_eq!(phi_subdiff(&c, &fin(&[0; 5]), 2), vec![2]);
    }

    #[test]
    fn improper_inputs() {
        assert!(matches!(phi_conjugate(&inner(), &[Ext::PosInf, Ext::PosInf, Ext::PosInf]), Err(Error::Improper(_))));
        assert!(matches!(phi_conjugate(&inner(), &[Ext::NegInf, Ext::Finite(0), Ext::PosInf]), Err(Error::Improper(_))));
        assert!(phi_conjugate(&inner(), &fin(&[0, 0])).is_err());
    }

    #[test]
    fn subdiff_of_half_square() {
        // ½x² doubled against the doubled inner product
        let g = [-2i64, -1, 0, 1, 2];
        let c = Coupling::from_fn(5, 5, |i, j| 2 * g[i] * g[j]).unwrap();
        let f: Vec<_> = g.iter().map(|t| Ext::Finite(t * t)).collect();
        assert!(phi_subdiff(&c, &f, 2).contains(&2));
        assert!(phi_subdiff(&c, &[Ext::PosInf, Ext::Finite(0), Ext::PosInf, Ext::Finite(1), Ext::Finite(4)], 0).is_empty());
    }

    fn brute_conjugate(c: &Coupling<i64>, f: &[Ext<i64>]) -> Vec<Ext<i64>> {
        let mut out = Vec::new();
        for j in 0..c.n_y {
            let mut best = None;
            for i in 0..c.n_x {
                if let Ext::Finite(v) = f[i] {
                    let cand = c.phi(i, j) - v;
                    best = Some(best.map_or(cand, |b: i64| b.max(cand)));
                }
            }
            out.push(best.map_or(Ext::NegInf, Ext::Finite));
        }
        out
    }

    fn random_instance(rng: &mut ChaCha8Rng, max: usize) -> (Coupling<i64>, Vec<Ext<i64>>) {
        let (nx, ny) = (rng.gen_range(1..=max), rng.gen_range(1..=max));
        let c = Coupling::new(nx, ny, (0..nx * ny).map(|_| rng.gen_range(-20..=20)).collect()).unwrap();
        let mut f: Vec<_> = (0..nx).map(|_| if rng.gen_bool(0.25) { Ext::PosInf } else { Ext::Finite(rng.gen_range(-20..=20)) }).collect();
        let k = rng.gen_range(0..nx);
        f[k] = Ext::Finite(rng.gen_range(-20..=20));
        (c, f)
    }

    #[test]
    fn matches_brute_force_and_fixed_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..500 {
            let (c, f) = random_instance(&mut rng, 7);
            let conj = phi_conjugate(&c, &f).unwrap();
            assert_eq!(conj, brute_conjugate(&c, &f));
            let bi = phi_biconjugate(&c, &f).unwrap();
            for (b, v) in bi.iter().zip(&f) {
                if let (Ext::Finite(b), Ext::Finite(v)) = (b, v) {
                    assert!(b <= v);
                }
            }
            // a biconjugate is Φ-convex, hence its own biconjugate
            assert_eq!(phi_biconjugate(&c, &bi).unwrap(), bi);
            assert_eq!(phi_conjugate(&c, &bi).unwrap(), conj);
            for j in 0..c.n_y {
                let direct: Vec<usize> = (0..c.n_x)
                    .filter(|&i| match &f[i] {
                        Ext::Finite(fi) => (0..c.n_x).all(|k| match &f[k] {
                            Ext::Finite(fk) => fi - c.phi(i, j) <= fk - c.phi(k, j),
                            _ => true,
                        }),
                        _ => false,
                    })
                    .collect();
                assert_eq!(phi_argmin(&c, &f, j), direct);
            }
        }
    }

    #[test]
    fn single_finite_point() {
        let c = inner();
        let f = vec![Ext::PosInf, Ext::PosInf, Ext::Finite(3)];
        let bi = phi_biconjugate(&c, &f).unwrap();
        assert!(bi.iter().all(|v| v.finite().is_some()));
        assert_eq!(bi[2], Ext::Finite(3));
    }

    #[test]
    fn duality_equivalence_exhaustive() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut agreeing_true = 0;
        for _ in 0..10_000 {
            let (c, f) = random_instance(&mut rng, 12);
            let (i, j) = (rng.gen_range(0..c.n_x), rng.gen_range(0..c.n_y));
            let r = fy_duality_check(&c, &f, i, j).unwrap();
            assert!(r.consistent(), "{r:?}");
            agreeing_true += r.a as usize;
        }
        assert!(agreeing_true > 100);
    }

    #[test]
    fn rational_engine_agrees_with_integers() {
        let c = inner();
        let f = fin(&[1, 0, 2]);
        let cq = c.map(|&v| rational_from_int(v));
        let fq: Vec<_> = [1, 0, 2].iter().map(|&v| Ext::Finite(rational_from_int(v))).collect();
        let a = phi_biconjugate(&c, &f).unwrap();
        let b = phi_biconjugate(&cq, &fq).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.finite().map(|&v| rational_from_int(v)).as_ref(), y.finite());
        }
    }
}
