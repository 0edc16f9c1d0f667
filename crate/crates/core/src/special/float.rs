//! Fixed-point arbitrary precision reals.
//!
//! A [`BigFloat`] stores `mant * 2^-bits` where `bits` comes from the
//! [`Precision`] it was created with. Errors are absolute: every operation is
//! exact up to truncation in the last bit, and a precision of `d` digits keeps
//! guard digits beyond `10^-d`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::exact::BigRational;

/// Extra decimal digits carried past the requested precision.
pub const GUARD_DIGITS: u32 = 20;

const LOG2_10: f64 = std::f64::consts::LOG2_10;

/// Requested accuracy in decimal digits after the point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Precision {
    digits: u32,
}

impl Precision {
    pub fn digits(digits: u32) -> Self {
        Self { digits }
    }

    pub fn decimal_digits(&self) -> u32 {
        self.digits
    }

    /// Fractional bits of the working representation.
    pub fn bits(&self) -> u64 {
        (f64::from(self.digits + GUARD_DIGITS) * LOG2_10).ceil() as u64
    }

    /// The same precision with `extra` more digits.
    pub fn raised(&self, extra: u32) -> Self {
        Self {
            digits: self.digits + extra,
        }
    }
}

/// `x / 2^bits` rounded toward zero.
fn shr_trunc(x: &BigInt, bits: u64) -> BigInt {
    if x.is_negative() {
        -((-x) >> bits)
    } else {
        x >> bits
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BigFloat {
    mant: BigInt,
    prec: Precision,
}

impl BigFloat {
    fn raw(mant: BigInt, prec: Precision) -> Self {
        Self { mant, prec }
    }

    pub fn zero(prec: Precision) -> Self {
        Self::raw(BigInt::zero(), prec)
    }

    pub fn one(prec: Precision) -> Self {
        Self::from_int(1, prec)
    }

    pub fn from_int(v: i64, prec: Precision) -> Self {
        Self::raw(BigInt::from(v) << prec.bits(), prec)
    }

    pub fn from_bigint(v: &BigInt, prec: Precision) -> Self {
        Self::raw(v << prec.bits(), prec)
    }

    pub fn from_rational(r: &BigRational, prec: Precision) -> Self {
        Self::raw((r.numer() << prec.bits()) / r.denom(), prec)
    }

    /// `10^-e`.
    pub fn ten_pow_neg(e: u32, prec: Precision) -> Self {
        let p = num_traits::pow::pow(BigInt::from(10), e as usize);
        Self::raw((BigInt::one() << prec.bits()) / p, prec)
    }

    pub fn precision(&self) -> Precision {
        self.prec
    }

    /// Converts to another precision, truncating or padding bits.
    pub fn with_precision(&self, prec: Precision) -> Self {
        let (a, b) = (self.prec.bits(), prec.bits());
        let mant = if b >= a {
            &self.mant << (b - a)
        } else {
            shr_trunc(&self.mant, a - b)
        };
        Self::raw(mant, prec)
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mant.is_negative()
    }

    pub fn abs(&self) -> Self {
        Self::raw(self.mant.abs(), self.prec)
    }

    pub fn mul_int(&self, v: i64) -> Self {
        Self::raw(&self.mant * v, self.prec)
    }

    pub fn div_int(&self, v: i64) -> Self {
        Self::raw(&self.mant / v, self.prec)
    }

    pub fn mul_bigint(&self, v: &BigInt) -> Self {
        Self::raw(&self.mant * v, self.prec)
    }

    pub fn div_bigint(&self, v: &BigInt) -> Self {
        Self::raw(&self.mant / v, self.prec)
    }

    pub fn mul_rational(&self, r: &BigRational) -> Self {
        Self::raw(&self.mant * r.numer() / r.denom(), self.prec)
    }

    pub fn square(&self) -> Self {
        self * self
    }

    pub fn sqrt(&self) -> Self {
        assert!(!self.is_negative(), "square root of a negative number");
        Self::raw((&self.mant << self.prec.bits()).sqrt(), self.prec)
    }

    /// Integer part of the base-2 logarithm, or `None` for zero.
    pub fn exponent2(&self) -> Option<i64> {
        if self.mant.is_zero() {
            return None;
        }
        Some(self.mant.bits() as i64 - 1 - self.prec.bits() as i64)
    }

    /// Multiplies by `2^e`.
    pub fn shl(&self, e: i64) -> Self {
        let mant = if e >= 0 {
            &self.mant << e as u64
        } else {
            shr_trunc(&self.mant, (-e) as u64)
        };
        Self::raw(mant, self.prec)
    }

    pub fn to_f64(&self) -> f64 {
        let shift = self.mant.bits().saturating_sub(60);
        let top = (&self.mant >> shift).to_f64().unwrap_or(f64::NAN);
        top * 2f64.powi(shift as i32 - self.prec.bits() as i32)
    }

    /// `|self - other| <= 10^-e`.
    pub fn within(&self, other: &BigFloat, e: u32) -> bool {
        (self - other).abs() <= BigFloat::ten_pow_neg(e, self.prec)
    }

    /// Decimal rendering with `places` digits after the point (truncated).
    pub fn to_decimal(&self, places: u32) -> String {
        let scale = num_traits::pow::pow(BigInt::from(10), places as usize);
        let v = (self.mant.abs() * scale) >> self.prec.bits();
        let digits = v.to_string();
        let places = places as usize;
        let padded = if digits.len() <= places {
            format!("{}{}", "0".repeat(places + 1 - digits.len()), digits)
        } else {
            digits
        };
        let (int_part, frac) = padded.split_at(padded.len() - places);
        let sign = if self.mant.sign() == Sign::Minus && !v.is_zero() {
            "-"
        } else {
            ""
        };
        if places == 0 {
            format!("{sign}{int_part}")
        } else {
            format!("{sign}{int_part}.{frac}")
        }
    }

    fn check(&self, other: &BigFloat) {
        debug_assert_eq!(self.prec.bits(), other.prec.bits(), "precision mismatch");
    }
}

impl fmt::Display for BigFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let places = f.precision().map(|p| p as u32).unwrap_or(self.prec.digits);
        f.write_str(&self.to_decimal(places))
    }
}

impl PartialOrd for BigFloat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.check(other);
        Some(self.mant.cmp(&other.mant))
    }
}

impl Add for &BigFloat {
    type Output = BigFloat;
    fn add(self, o: &BigFloat) -> BigFloat {
        self.check(o);
        BigFloat::raw(&self.mant + &o.mant, self.prec)
    }
}

impl Sub for &BigFloat {
    type Output = BigFloat;
    fn sub(self, o: &BigFloat) -> BigFloat {
        self.check(o);
        BigFloat::raw(&self.mant - &o.mant, self.prec)
    }
}

impl Mul for &BigFloat {
    type Output = BigFloat;
    fn mul(self, o: &BigFloat) -> BigFloat {
        self.check(o);
        BigFloat::raw(
            shr_trunc(&(&self.mant * &o.mant), self.prec.bits()),
            self.prec,
        )
    }
}

impl Div for &BigFloat {
    type Output = BigFloat;
    fn div(self, o: &BigFloat) -> BigFloat {
        self.check(o);
        assert!(!o.mant.is_zero(), "division by zero");
        BigFloat::raw((&self.mant << self.prec.bits()) / &o.mant, self.prec)
    }
}

impl Neg for &BigFloat {
    type Output = BigFloat;
    fn neg(self) -> BigFloat {
        BigFloat::raw(-&self.mant, self.prec)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for BigFloat {
            type Output = BigFloat;
            fn $m(self, o: BigFloat) -> BigFloat {
                (&self).$m(&o)
            }
        }
        impl $tr<&BigFloat> for BigFloat {
            type Output = BigFloat;
            fn $m(self, o: &BigFloat) -> BigFloat {
                (&self).$m(o)
            }
        }
        impl $tr<BigFloat> for &BigFloat {
            type Output = BigFloat;
            fn $m(self, o: BigFloat) -> BigFloat {
                self.$m(&o)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for BigFloat {
    type Output = BigFloat;
    fn neg(self) -> BigFloat {
        BigFloat::raw(-self.mant, self.prec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    #[test]
    fn rational_round_trip() {
        let p = Precision::digits(30);
        let x = BigFloat::from_rational(&rat(1, 3), p);
        assert_eq!(x.to_decimal(10), "0.3333333333");
        let y = BigFloat::from_rational(&rat(-7, 4), p);
        assert_eq!(y.to_decimal(3), "-1.750");
        assert_eq!((&x * &BigFloat::from_int(3, p)).to_decimal(5), "0.99999");
    }

    #[test]
    fn sqrt_two() {
        let p = Precision::digits(40);
        let s = BigFloat::from_int(2, p).sqrt();
        assert_eq!(s.to_decimal(30), "1.414213562373095048801688724209");
        assert!((&s * &s).within(&BigFloat::from_int(2, p), 40));
    }

    #[test]
    fn precision_change() {
        let p = Precision::digits(20);
        let x = BigFloat::from_rational(&rat(22, 7), p);
        let y = x.with_precision(Precision::digits(60)).with_precision(p);
        assert_eq!(x, y);
        assert_eq!(x.exponent2(), Some(1));
        assert!((x.to_f64() - 22.0 / 7.0).abs() < 1e-14);
    }
}
