//! Extended real numbers `ℝ ∪ {−∞, +∞}`.
//!
//! Indeterminate forms are rejected instead of being resolved by a
//! convention: `+∞ + (−∞)` is an [`Error::Indeterminate`], never a NaN.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
enum Repr {
    NegInf,
    Finite(f64),
    PosInf,
}

/// An extended real number. The finite payload is never NaN or infinite.
#[derive(Clone, Copy, PartialEq)]
pub struct ExtReal(Repr);

impl ExtReal {
    pub const POS_INF: ExtReal = ExtReal(Repr::PosInf);
    pub const NEG_INF: ExtReal = ExtReal(Repr::NegInf);
    pub const ZERO: ExtReal = ExtReal(Repr::Finite(0.0));

    /// Strict constructor: `±∞` floats map to the infinite tags, NaN is an error.
    pub fn try_new(v: f64) -> Result<Self> {
        if v.is_nan() {
            Err(Error::NotANumber)
        } else {
            Ok(Self::from_non_nan(v))
        }
    }

    /// Lenient constructor for values produced by evaluating formulas.
    ///
    /// A NaN can only come out of a formula that overflowed (e.g. `∞·0` in
    /// a Bregman distance evaluated far outside the representable range);
    /// such points are treated as lying outside the effective domain.
    pub fn from_eval(v: f64) -> Self {
        if v.is_nan() {
            ExtReal::POS_INF
        } else {
            Self::from_non_nan(v)
        }
    }

    fn from_non_nan(v: f64) -> Self {
        if v == f64::INFINITY {
            ExtReal::POS_INF
        } else if v == f64::NEG_INFINITY {
            ExtReal::NEG_INF
        } else if v == 0.0 {
            // fold −0 into +0 so that equality and hashing agree
            ExtReal(Repr::Finite(0.0))
        } else {
            ExtReal(Repr::Finite(v))
        }
    }

    pub fn finite(self) -> Option<f64> {
        match self.0 {
            Repr::Finite(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self.0, Repr::Finite(_))
    }

    pub fn is_pos_inf(self) -> bool {
        matches!(self.0, Repr::PosInf)
    }

    pub fn is_neg_inf(self) -> bool {
        matches!(self.0, Repr::NegInf)
    }

    /// Lossy view as an `f64` (`±∞` map to the IEEE infinities).
    pub fn to_f64(self) -> f64 {
        match self.0 {
            Repr::NegInf => f64::NEG_INFINITY,
            Repr::Finite(v) => v,
            Repr::PosInf => f64::INFINITY,
        }
    }

    pub fn checked_add(self, rhs: ExtReal) -> Result<ExtReal> {
        match (self.0, rhs.0) {
            (Repr::PosInf, Repr::NegInf) | (Repr::NegInf, Repr::PosInf) => {
                Err(Error::Indeterminate("+∞ + (−∞)"))
            }
            (Repr::PosInf, _) | (_, Repr::PosInf) => Ok(ExtReal::POS_INF),
            (Repr::NegInf, _) | (_, Repr::NegInf) => Ok(ExtReal::NEG_INF),
            (Repr::Finite(a), Repr::Finite(b)) => Ok(Self::from_sum(a + b)),
        }
    }

    pub fn checked_sub(self, rhs: ExtReal) -> Result<ExtReal> {
        match (self.0, rhs.0) {
            (Repr::PosInf, Repr::PosInf) | (Repr::NegInf, Repr::NegInf) => {
                Err(Error::Indeterminate("∞ − ∞"))
            }
            _ => self.checked_add(-rhs),
        }
    }

    /// Adds a finite real; never fails.
    pub fn add_real(self, c: f64) -> ExtReal {
        debug_assert!(c.is_finite());
        match self.0 {
            Repr::Finite(a) => Self::from_sum(a + c),
            _ => self,
        }
    }

    /// Multiplies by a positive finite scalar.
    pub fn scale(self, c: f64) -> ExtReal {
        debug_assert!(c > 0.0 && c.is_finite());
        match self.0 {
            Repr::Finite(a) => Self::from_sum(a * c),
            _ => self,
        }
    }

    // finite + finite may overflow to ±inf, which is a legitimate extended value
    fn from_sum(v: f64) -> ExtReal {
        Self::from_non_nan(v)
    }

    pub fn min(self, other: ExtReal) -> ExtReal {
        if other < self {
            other
        } else {
            self
        }
    }

    pub fn max(self, other: ExtReal) -> ExtReal {
        if other > self {
            other
        } else {
            self
        }
    }

    fn rank(self) -> u8 {
        match self.0 {
            Repr::NegInf => 0,
            Repr::Finite(_) => 1,
            Repr::PosInf => 2,
        }
    }
}

impl std::ops::Neg for ExtReal {
    type Output = ExtReal;
    fn neg(self) -> ExtReal {
        match self.0 {
            Repr::NegInf => ExtReal::POS_INF,
            Repr::PosInf => ExtReal::NEG_INF,
            Repr::Finite(v) => ExtReal::from_non_nan(-v),
        }
    }
}

impl Eq for ExtReal {}

impl Ord for ExtReal {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.0, other.0) {
            (Repr::Finite(a), Repr::Finite(b)) => a.total_cmp(&b),
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl From<i32> for ExtReal {
    fn from(v: i32) -> Self {
        ExtReal(Repr::Finite(v as f64))
    }
}

impl fmt::Debug for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Repr::NegInf => write!(f, "-inf"),
            Repr::PosInf => write!(f, "inf"),
            Repr::Finite(v) => write!(f, "{v}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infinity_minus_infinity_is_rejected() {
        assert!(matches!(
            ExtReal::POS_INF.checked_add(ExtReal::NEG_INF),
            Err(Error::Indeterminate(_))
        ));
        assert!(ExtReal::POS_INF.checked_sub(ExtReal::POS_INF).is_err());
        assert!(ExtReal::NEG_INF.checked_sub(ExtReal::NEG_INF).is_err());
        assert_eq!(
            ExtReal::POS_INF.checked_sub(ExtReal::NEG_INF).unwrap(),
            ExtReal::POS_INF
        );
    }

    #[test]
    fn nan_is_not_constructible() {
        assert_eq!(ExtReal::try_new(f64::NAN), Err(Error::NotANumber));
        assert_eq!(ExtReal::from_eval(f64::NAN), ExtReal::POS_INF);
        assert_eq!(ExtReal::try_new(f64::NEG_INFINITY).unwrap(), ExtReal::NEG_INF);
    }

    #[test]
    fn total_order() {
        let xs = [
            ExtReal::POS_INF,
            ExtReal::from(3),
            ExtReal::NEG_INF,
            ExtReal::try_new(-1e300).unwrap(),
        ];
        let mut sorted = xs.to_vec();
        sorted.sort();
        assert_eq!(sorted[0], ExtReal::NEG_INF);
        assert_eq!(sorted[1].finite(), Some(-1e300));
        assert_eq!(sorted[3], ExtReal::POS_INF);
        assert_eq!(ExtReal::try_new(-0.0).unwrap(), ExtReal::ZERO);
    }

    #[test]
    fn overflowing_sum_saturates() {
        let big = ExtReal::try_new(f64::MAX).unwrap();
        assert_eq!(big.checked_add(big).unwrap(), ExtReal::POS_INF);
        assert_eq!(big.scale(2.0), ExtReal::POS_INF);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn ext() -> impl Strategy<Value = ExtReal> {
            prop_oneof![
                Just(ExtReal::POS_INF),
                Just(ExtReal::NEG_INF),
                (-1e6f64..1e6).prop_map(|v| ExtReal::try_new(v).unwrap()),
            ]
        }

        proptest! {
            #[test]
            fn arithmetic_never_yields_nan(a in ext(), b in ext()) {
                if let Ok(s) = a.checked_add(b) {
                    prop_assert!(!s.to_f64().is_nan());
                }
                if let Ok(s) = a.checked_sub(b) {
                    prop_assert!(!s.to_f64().is_nan());
                }
                prop_assert!(!(-a).to_f64().is_nan());
            }
        }
    }
}
