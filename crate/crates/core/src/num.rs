//! Numeric abstraction shared by every solver.
//!
//! Two arithmetic modes are supported: exact rationals ([`Rational`]) and
//! `f64` with an absolute tolerance of `1e-9` on every equality or sign test.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::ParseNumberError;

/// Exact rational number.
pub type Rational = BigRational;

/// Tolerance used for every comparison in float mode.
pub const FLOAT_TOLERANCE: f64 = 1e-9;

/// A number usable by the schedule model and the solvers.
pub trait Scalar:
    Clone
    + Debug
    + Display
    + PartialEq
    + PartialOrd
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + Sum
    + Send
    + Sync
    + 'static
{
    /// `true` for exact arithmetic.
    const EXACT: bool;

    fn from_int(v: i64) -> Self;

    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_int(num) / Self::from_int(den)
    }

    fn to_f64(&self) -> f64;

    /// Tolerance for sign and equality tests (zero in exact mode).
    fn tolerance() -> Self;

    fn abs(&self) -> Self {
        if *self < Self::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    fn near_zero(&self) -> bool {
        self.abs() <= Self::tolerance()
    }

    fn near(&self, other: &Self) -> bool {
        (self.clone() - other.clone()).near_zero()
    }

    /// Strictly positive beyond the tolerance.
    fn is_pos(&self) -> bool {
        *self > Self::tolerance()
    }

    /// Strictly negative beyond the tolerance.
    fn is_neg(&self) -> bool {
        *self < -Self::tolerance()
    }

    /// `self < other` beyond the tolerance.
    fn lt_tol(&self, other: &Self) -> bool {
        (other.clone() - self.clone()).is_pos()
    }

    /// `self <= other` up to the tolerance.
    fn le_tol(&self, other: &Self) -> bool {
        !(self.clone() - other.clone()).is_pos()
    }

    /// Parses `"3"`, `"2.75"`, `"-1e-3"` or `"5/8"`.
    fn parse_str(s: &str) -> Result<Self, ParseNumberError>;

    /// Converts an exact rational into this representation.
    fn from_rational(r: &Rational) -> Self;

    fn to_rational(&self) -> Rational;

    fn min_of(a: Self, b: Self) -> Self {
        if b < a {
            b
        } else {
            a
        }
    }

    fn max_of(a: Self, b: Self) -> Self {
        if b > a {
            b
        } else {
            a
        }
    }

    /// Clamps values within tolerance of zero to exactly zero.
    fn snap(self) -> Self {
        if self.near_zero() {
            Self::zero()
        } else {
            self
        }
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn from_int(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn tolerance() -> Self {
        Self::zero()
    }

    fn abs(&self) -> Self {
        Signed::abs(self)
    }

    fn near_zero(&self) -> bool {
        self.is_zero()
    }

    fn is_pos(&self) -> bool {
        Signed::is_positive(self)
    }

    fn is_neg(&self) -> bool {
        Signed::is_negative(self)
    }

    fn parse_str(s: &str) -> Result<Self, ParseNumberError> {
        parse_rational(s)
    }

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn to_rational(&self) -> Rational {
        self.clone()
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_int(v: i64) -> Self {
        v as f64
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn tolerance() -> Self {
        FLOAT_TOLERANCE
    }

    fn abs(&self) -> Self {
        f64::abs(*self)
    }

    fn parse_str(s: &str) -> Result<Self, ParseNumberError> {
        let s = s.trim();
        if let Some((n, d)) = s.split_once('/') {
            let n: f64 = n.trim().parse().map_err(|_| ParseNumberError(s.to_string()))?;
            let d: f64 = d.trim().parse().map_err(|_| ParseNumberError(s.to_string()))?;
            if d == 0.0 {
                return Err(ParseNumberError(s.to_string()));
            }
            return Ok(n / d);
        }
        let v: f64 = s.parse().map_err(|_| ParseNumberError(s.to_string()))?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(ParseNumberError(s.to_string()))
        }
    }

    fn from_rational(r: &Rational) -> Self {
        Scalar::to_f64(r)
    }

    fn to_rational(&self) -> Rational {
        BigRational::from_float(*self).unwrap_or_else(BigRational::zero)
    }
}

/// Parses a decimal (optionally with exponent) or `a/b` string exactly.
pub fn parse_rational(s: &str) -> Result<Rational, ParseNumberError> {
    let err = || ParseNumberError(s.to_string());
    let t = s.trim();
    if t.is_empty() {
        return Err(err());
    }
    if let Some((n, d)) = t.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| err())?;
        let d = BigInt::from_str(d.trim()).map_err(|_| err())?;
        if d.is_zero() {
            return Err(err());
        }
        return Ok(BigRational::new(n, d));
    }
    let (mantissa, exponent) = match t.find(['e', 'E']) {
        Some(pos) => {
            let e: i32 = t[pos + 1..].parse().map_err(|_| err())?;
            (&t[..pos], e)
        }
        None => (t, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(err());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(err());
    }
    let all_digits = format!("{int_part}{frac_part}");
    let mut num = BigInt::from_str(if all_digits.is_empty() { "0" } else { &all_digits })
        .map_err(|_| err())?;
    if negative {
        num = -num;
    }
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let value = if scale >= 0 {
        BigRational::from_integer(num * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(num, num_traits::pow(ten, (-scale) as usize))
    };
    Ok(value)
}

/// Renders an exact rational as `"a"` or `"a/b"`.
pub fn rational_to_string(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// JSON encoding: integers (and all floats) as numbers, other rationals as
/// `"a/b"` strings so that exact values survive a round trip.
pub fn to_json_value<T: Scalar>(v: &T) -> serde_json::Value {
    if T::EXACT {
        let r = v.to_rational();
        if r.is_integer() {
            if let Some(i) = r.numer().to_i64() {
                return serde_json::Value::from(i);
            }
        }
        serde_json::Value::String(rational_to_string(&r))
    } else {
        serde_json::Number::from_f64(v.to_f64())
            .map(serde_json::Value::Number)
            .unwrap_or(serde_json::Value::Null)
    }
}

/// Decodes a JSON number or string into a scalar.
pub fn from_json_value<T: Scalar>(v: &serde_json::Value) -> Result<T, ParseNumberError> {
    match v {
        serde_json::Value::Number(n) => T::parse_str(&n.to_string()),
        serde_json::Value::String(s) => T::parse_str(s),
        other => Err(ParseNumberError(other.to_string())),
    }
}

/// Human-readable value: exact fraction, or float rounded to 12 significant digits.
pub fn display<T: Scalar>(v: &T) -> String {
    if T::EXACT {
        rational_to_string(&v.to_rational())
    } else {
        let x = v.to_f64();
        let s = format!("{:.12}", x);
        let s = s.trim_end_matches('0').trim_end_matches('.');
        if s == "-0" {
            "0".to_string()
        } else {
            s.to_string()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    #[test]
    fn parses_fraction_strings() {
        assert_eq!(parse_rational("5/8").unwrap(), q(5, 8));
        assert_eq!(parse_rational(" -3/6 ").unwrap(), q(-1, 2));
        assert!(parse_rational("1/0").is_err());
    }

    #[test]
    fn parses_decimals_exactly() {
        assert_eq!(parse_rational("2.75").unwrap(), q(11, 4));
        assert_eq!(parse_rational("0.1").unwrap(), q(1, 10));
        assert_eq!(parse_rational("1e-3").unwrap(), q(1, 1000));
        assert_eq!(parse_rational("-12").unwrap(), q(-12, 1));
        assert_eq!(parse_rational(".5").unwrap(), q(1, 2));
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn json_round_trip_keeps_exact_values() {
        for v in [q(7, 1), q(5, 8), q(-13, 3)] {
            let j = to_json_value(&v);
            assert_eq!(from_json_value::<Rational>(&j).unwrap(), v);
        }
        assert_eq!(to_json_value(&q(6, 1)), serde_json::json!(6));
        assert_eq!(to_json_value(&q(1, 2)), serde_json::json!("1/2"));
    }

    #[test]
    fn float_tolerance_applies() {
        assert!((1e-10f64).near_zero());
        assert!(!(1e-8f64).near_zero());
        assert!(1.0f64.near(&(1.0 + 5e-10)));
        assert!(!Rational::from_ratio(1, 1_000_000_000_000).near_zero());
    }
}
