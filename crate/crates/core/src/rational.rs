//! Exact non-negative rationals used for masses, epsilons and energy ratios.

use std::fmt;

use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

/// Non-negative rational in lowest terms.
///
/// Serializes to JSON as `{"num": .., "den": ..}` and displays as `num/den`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(Ratio<u128>);

/// Decimal expansion of exp(-2) truncated to 25 places.
const EXP_MINUS_TWO_E25: u128 = 1_353_352_832_366_126_918_939_994;
const TEN_POW_25: u128 = 10_000_000_000_000_000_000_000_000;

impl Rational {
    /// Panics on a zero denominator.
    pub fn new(num: u128, den: u128) -> Self {
        Rational(Ratio::new(num, den))
    }

    pub fn zero() -> Self {
        Rational(Ratio::zero())
    }

    pub fn one() -> Self {
        Rational::new(1, 1)
    }

    pub fn num(&self) -> u128 {
        *self.0.numer()
    }

    pub fn den(&self) -> u128 {
        *self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    /// `1 - self`, saturating at zero.
    pub fn complement(&self) -> Self {
        if self.num() >= self.den() {
            Rational::zero()
        } else {
            Rational::new(self.den() - self.num(), self.den())
        }
    }

    /// Decides `self < exp(-2)` exactly whenever the value is further than
    /// 1e-25 from exp(-2); closer values fall back to `f64` comparison.
    pub fn below_exp_minus_two(&self) -> bool {
        let (num, den) = (self.num(), self.den());
        let lhs = num.checked_mul(TEN_POW_25);
        let lo = den.checked_mul(EXP_MINUS_TWO_E25);
        let hi = den.checked_mul(EXP_MINUS_TWO_E25 + 1);
        match (lhs, lo, hi) {
            (Some(lhs), Some(lo), Some(hi)) => {
                if lhs <= lo {
                    true
                } else if lhs >= hi {
                    false
                } else {
                    self.to_f64() < (-2.0f64).exp()
                }
            }
            _ => self.to_f64() < (-2.0f64).exp(),
        }
    }

    pub fn as_ratio(&self) -> &Ratio<u128> {
        &self.0
    }
}

impl From<Ratio<u128>> for Rational {
    fn from(r: Ratio<u128>) -> Self {
        Rational(r)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num(), self.den())
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("Rational", 2)?;
        s.serialize_field("num", &self.num())?;
        s.serialize_field("den", &self.den())?;
        s.end()
    }
}
