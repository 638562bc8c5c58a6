//! Exact nonnegative rationals.
//!
//! Every point, gap endpoint, ratio and tolerance in the crate is an
//! [`ExactRational`]. Values are kept in lowest terms by `num-rational`;
//! this wrapper adds the nonnegativity invariant, the `p/q` text encoding
//! used by the JSON formats, and an extended type for `+∞`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

/// An arbitrary-precision rational number `>= 0`, always in lowest terms.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExactRational(BigRational);

impl ExactRational {
    pub fn zero() -> Self {
        ExactRational(BigRational::zero())
    }

    pub fn one() -> Self {
        ExactRational(BigRational::one())
    }

    pub fn from_integer(n: u64) -> Self {
        ExactRational(BigRational::from_integer(BigInt::from(n)))
    }

    /// `numer / denom`. Panics when `denom == 0`.
    pub fn new(numer: u64, denom: u64) -> Self {
        assert!(denom != 0, "zero denominator");
        ExactRational(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    pub fn from_biguints(numer: BigUint, denom: BigUint) -> Self {
        assert!(!denom.is_zero(), "zero denominator");
        ExactRational(BigRational::new(
            BigInt::from_biguint(Sign::Plus, numer),
            BigInt::from_biguint(Sign::Plus, denom),
        ))
    }

    /// Wraps a `BigRational`, rejecting negative values.
    pub fn from_big(value: BigRational) -> Option<Self> {
        if value.is_negative() {
            None
        } else {
            Some(ExactRational(value))
        }
    }

    /// `2^exp` for any integer exponent.
    pub fn pow2(exp: i64) -> Self {
        Self::int_pow(2, exp)
    }

    /// `base^exp` for an integer base `>= 1` and any integer exponent.
    pub fn int_pow(base: u64, exp: i64) -> Self {
        assert!(base >= 1, "base must be positive");
        let magnitude = num_traits::pow(BigInt::from(base), exp.unsigned_abs() as usize);
        if exp >= 0 {
            ExactRational(BigRational::from_integer(magnitude))
        } else {
            ExactRational(BigRational::new(BigInt::one(), magnitude))
        }
    }

    pub fn as_big(&self) -> &BigRational {
        &self.0
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    /// Larger of the numerator and denominator bit lengths.
    pub fn bits(&self) -> u64 {
        self.0.numer().bits().max(self.0.denom().bits())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    /// Reciprocal. Panics on zero.
    pub fn recip(&self) -> Self {
        assert!(!self.is_zero(), "reciprocal of zero");
        ExactRational(self.0.recip())
    }

    /// `self - other` when the result is nonnegative.
    pub fn checked_sub(&self, other: &Self) -> Option<Self> {
        let diff = &self.0 - &other.0;
        Self::from_big(diff)
    }

    /// `|self - other|`.
    pub fn abs_diff(&self, other: &Self) -> Self {
        ExactRational((&self.0 - &other.0).abs())
    }

    /// `(self + other) / 2`.
    pub fn midpoint(&self, other: &Self) -> Self {
        ExactRational((&self.0 + &other.0) / BigRational::from_integer(BigInt::from(2)))
    }

    /// Floor of `log2(self)` for a positive value.
    pub fn floor_log2(&self) -> i64 {
        assert!(self.is_positive(), "log of nonpositive value");
        let n = self.0.numer().bits() as i64;
        let d = self.0.denom().bits() as i64;
        // 2^(n-1) <= numer < 2^n, same for denom, so the answer is n-d or n-d-1.
        let guess = n - d;
        if *self >= Self::pow2(guess) {
            guess
        } else {
            guess - 1
        }
    }

    /// Lossy conversion for display and plotting only.
    pub fn to_f64(&self) -> f64 {
        use num_traits::ToPrimitive;
        match self.0.to_f64() {
            Some(v) if v.is_finite() && (v != 0.0 || self.is_zero()) => v,
            _ => {
                // Very large or very small values: go through log2.
                let shift = self.0.numer().bits() as i64 - self.0.denom().bits() as i64;
                let scaled = self * &Self::pow2(-shift);
                scaled.0.to_f64().unwrap_or(1.0) * 2f64.powi(shift.clamp(-2000, 2000) as i32)
            }
        }
    }
}

impl fmt::Display for ExactRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for ExactRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.bits() > 128 {
            write!(f, "~2^{}", self.floor_log2())
        } else {
            fmt::Display::fmt(self, f)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational {0:?}: expected \"p\" or \"p/q\" with p >= 0, q > 0")]
pub struct ParseRationalError(pub String);

impl FromStr for ExactRational {
    type Err = ParseRationalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseRationalError(s.to_string());
        let trimmed = s.trim();
        let (p, q) = match trimmed.split_once('/') {
            Some((p, q)) => (p.trim(), q.trim()),
            None => (trimmed, "1"),
        };
        let all_digits = |t: &str| !t.is_empty() && t.bytes().all(|b| b.is_ascii_digit());
        if !all_digits(p) || !all_digits(q) {
            return Err(err());
        }
        let p: BigUint = p.parse().map_err(|_| err())?;
        let q: BigUint = q.parse().map_err(|_| err())?;
        if q.is_zero() {
            return Err(err());
        }
        Ok(ExactRational::from_biguints(p, q))
    }
}

impl Serialize for ExactRational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ExactRational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(de::Error::custom)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident) => {
        impl $tr<&ExactRational> for &ExactRational {
            type Output = ExactRational;
            fn $method(self, rhs: &ExactRational) -> ExactRational {
                ExactRational((&self.0).$method(&rhs.0))
            }
        }
        impl $tr<ExactRational> for ExactRational {
            type Output = ExactRational;
            fn $method(self, rhs: ExactRational) -> ExactRational {
                ExactRational(self.0.$method(rhs.0))
            }
        }
        impl $tr<&ExactRational> for ExactRational {
            type Output = ExactRational;
            fn $method(self, rhs: &ExactRational) -> ExactRational {
                ExactRational(self.0.$method(&rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Mul, mul);

impl Div<&ExactRational> for &ExactRational {
    type Output = ExactRational;
    fn div(self, rhs: &ExactRational) -> ExactRational {
        assert!(!rhs.is_zero(), "division by zero");
        ExactRational(&self.0 / &rhs.0)
    }
}

impl Div<ExactRational> for ExactRational {
    type Output = ExactRational;
    fn div(self, rhs: ExactRational) -> ExactRational {
        &self / &rhs
    }
}

/// A nonnegative rational or `+∞`. Serialized as `"p/q"` or `"inf"`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Extended {
    Finite(ExactRational),
    Infinite,
}

impl Extended {
    pub fn finite(&self) -> Option<&ExactRational> {
        match self {
            Extended::Finite(v) => Some(v),
            Extended::Infinite => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Extended::Infinite)
    }

    /// `1/x` with `1/∞ = 0` and `1/0 = ∞`.
    pub fn recip(&self) -> Extended {
        match self {
            Extended::Infinite => Extended::Finite(ExactRational::zero()),
            Extended::Finite(v) if v.is_zero() => Extended::Infinite,
            Extended::Finite(v) => Extended::Finite(v.recip()),
        }
    }
}

impl From<ExactRational> for Extended {
    fn from(v: ExactRational) -> Self {
        Extended::Finite(v)
    }
}

impl PartialOrd for Extended {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Extended {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Extended::Finite(a), Extended::Finite(b)) => a.cmp(b),
            (Extended::Finite(_), Extended::Infinite) => Ordering::Less,
            (Extended::Infinite, Extended::Finite(_)) => Ordering::Greater,
            (Extended::Infinite, Extended::Infinite) => Ordering::Equal,
        }
    }
}

impl fmt::Display for Extended {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extended::Finite(v) => fmt::Display::fmt(v, f),
            Extended::Infinite => f.write_str("inf"),
        }
    }
}

impl fmt::Debug for Extended {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extended::Finite(v) => fmt::Debug::fmt(v, f),
            Extended::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for Extended {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Extended {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        if s == "inf" {
            Ok(Extended::Infinite)
        } else {
            s.parse().map(Extended::Finite).map_err(de::Error::custom)
        }
    }
}

/// Shorthand for `ExactRational::new`, used heavily in tests.
pub fn rat(numer: u64, denom: u64) -> ExactRational {
    ExactRational::new(numer, denom)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lowest_terms_and_display() {
        assert_eq!(rat(2, 4).to_string(), "1/2");
        assert_eq!(rat(6, 3).to_string(), "2");
        assert_eq!(ExactRational::zero().to_string(), "0");
    }

    #[test]
    fn parse_accepts_integers_and_fractions() {
        assert_eq!("3/4".parse::<ExactRational>().unwrap(), rat(3, 4));
        assert_eq!("7".parse::<ExactRational>().unwrap(), rat(7, 1));
        assert_eq!(" 10 / 4 ".parse::<ExactRational>().unwrap(), rat(5, 2));
        assert!("-1/2".parse::<ExactRational>().is_err());
        assert!("1/0".parse::<ExactRational>().is_err());
        assert!("0.5".parse::<ExactRational>().is_err());
        assert!("".parse::<ExactRational>().is_err());
    }

    #[test]
    fn powers_of_two() {
        assert_eq!(ExactRational::pow2(-3), rat(1, 8));
        assert_eq!(ExactRational::pow2(4), rat(16, 1));
        assert_eq!(ExactRational::int_pow(3, -2), rat(1, 9));
        assert_eq!(ExactRational::pow2(-1600).bits(), 1601);
    }

    #[test]
    fn floor_log2_brackets() {
        assert_eq!(rat(3, 4).floor_log2(), -1);
        assert_eq!(rat(1, 1).floor_log2(), 0);
        assert_eq!(rat(1, 2).floor_log2(), -1);
        assert_eq!(rat(5, 1).floor_log2(), 2);
        assert_eq!(ExactRational::pow2(-900).floor_log2(), -900);
    }

    #[test]
    fn subtraction_is_checked() {
        assert_eq!(rat(1, 2).checked_sub(&rat(1, 3)), Some(rat(1, 6)));
        assert_eq!(rat(1, 3).checked_sub(&rat(1, 2)), None);
        assert_eq!(rat(1, 3).abs_diff(&rat(1, 2)), rat(1, 6));
    }

    #[test]
    fn extended_order_and_recip() {
        assert!(Extended::Infinite > Extended::Finite(rat(1000, 1)));
        assert_eq!(Extended::Infinite.recip(), Extended::Finite(ExactRational::zero()));
        assert_eq!(Extended::Finite(rat(2, 1)).recip(), Extended::Finite(rat(1, 2)));
        let json = serde_json::to_string(&Extended::Infinite).unwrap();
        assert_eq!(json, "\"inf\"");
        let back: Extended = serde_json::from_str("\"3/7\"").unwrap();
        assert_eq!(back, Extended::Finite(rat(3, 7)));
    }

    #[test]
    fn to_f64_handles_tiny_values() {
        let tiny = ExactRational::pow2(-5000);
        assert_eq!(tiny.to_f64(), 0.0);
        assert!((rat(1, 3).to_f64() - 1.0 / 3.0).abs() < 1e-15);
    }
}
