//! Constants and special functions at a given precision.

use std::sync::Mutex;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::float::{BigFloat, Precision};
use super::{Result, SpecialError};
use crate::exact::{int, rat, BigRational};

/// `sum_k (-1)^k / ((2k+1) x^(2k+1))` for an integer `x >= 2`.
fn atan_inv(x: u64, prec: Precision) -> BigFloat {
    let one = BigFloat::one(prec);
    let x2 = BigInt::from(x) * BigInt::from(x);
    let mut power = one.div_int(x as i64);
    let mut sum = BigFloat::zero(prec);
    let mut k: i64 = 0;
    while !power.is_zero() {
        let term = power.div_int(2 * k + 1);
        sum = if k % 2 == 0 {
            &sum + &term
        } else {
            &sum - &term
        };
        power = power.div_bigint(&x2);
        k += 1;
    }
    sum
}

/// Machin's formula.
pub fn pi(prec: Precision) -> BigFloat {
    atan_inv(5, prec).mul_int(16) - atan_inv(239, prec).mul_int(4)
}

/// `atanh(t)` for `|t| <= 1/2`.
fn atanh_small(t: &BigFloat) -> BigFloat {
    let prec = t.precision();
    let t2 = t.square();
    let mut power = t.clone();
    let mut sum = BigFloat::zero(prec);
    let mut k: i64 = 0;
    while !power.is_zero() {
        sum = &sum + &power.div_int(2 * k + 1);
        power = &power * &t2;
        k += 1;
    }
    sum
}

pub fn ln2(prec: Precision) -> BigFloat {
    atanh_small(&BigFloat::from_rational(&rat(1, 3), prec)).mul_int(2)
}

/// Natural logarithm of a positive number.
pub fn ln(x: &BigFloat) -> Result<BigFloat> {
    if x.is_negative() || x.is_zero() {
        return Err(SpecialError::Domain(format!(
            "ln of nonpositive value {}",
            x.to_decimal(6)
        )));
    }
    let prec = x.precision();
    // x = 2^e y with y in [3/4, 3/2)
    let mut e = x.exponent2().expect("nonzero");
    let mut y = x.shl(-e);
    if y > BigFloat::from_rational(&rat(3, 2), prec) {
        y = y.shl(-1);
        e += 1;
    }
    let one = BigFloat::one(prec);
    let t = (&y - &one) / (&y + &one);
    Ok(atanh_small(&t).mul_int(2) + ln2(prec).mul_int(e))
}

pub fn ln_rational(x: &BigRational, prec: Precision) -> Result<BigFloat> {
    ln(&BigFloat::from_rational(x, prec))
}

/// Euler's constant by the Brent–McMillan algorithm.
pub fn euler_gamma(prec: Precision) -> BigFloat {
    let work = prec.raised(10);
    let digits = f64::from(work.decimal_digits() + super::float::GUARD_DIGITS);
    let n = (digits * std::f64::consts::LN_10 / 4.0).ceil() as i64 + 1;
    let n2 = BigInt::from(n) * BigInt::from(n);
    let ln_n = ln(&BigFloat::from_int(n, work)).expect("positive");
    let mut a = -ln_n;
    let mut b = BigFloat::one(work);
    let mut u = a.clone();
    let mut v = b.clone();
    let mut k: i64 = 1;
    loop {
        let kk = BigInt::from(k) * BigInt::from(k);
        b = b.mul_bigint(&n2).div_bigint(&kk);
        a = (a.mul_bigint(&n2).div_int(k) + &b).div_int(k);
        u = &u + &a;
        v = &v + &b;
        if k > n && a.is_zero() && b.is_zero() {
            break;
        }
        k += 1;
    }
    (u / v).with_precision(prec)
}

static BERNOULLI: Mutex<Vec<BigRational>> = Mutex::new(Vec::new());

/// Bernoulli number `B_m`, from a shared cache extended on demand.
fn bernoulli(m: usize) -> BigRational {
    let mut b = BERNOULLI.lock().unwrap_or_else(|e| e.into_inner());
    while b.len() <= m {
        let len = b.len();
        if len == 0 {
            b.push(int(1));
            continue;
        }
        let mut acc = BigRational::zero();
        let mut binom = BigInt::one();
        for (j, bj) in b.iter().enumerate() {
            acc += bj * BigRational::from_integer(binom.clone());
            binom = binom * BigInt::from(len + 1 - j) / BigInt::from(j + 1);
        }
        b.push(-acc / int(len as i64 + 1));
    }
    b[m].clone()
}

fn check_positive(x: &BigRational) -> Result<()> {
    if !x.is_positive() {
        return Err(SpecialError::Domain(format!(
            "argument {x} must be positive"
        )));
    }
    Ok(())
}

/// Smallest shift with `x + shift` above the asymptotic threshold.
fn lift(x: &BigRational, prec: Precision) -> (i64, BigRational) {
    let threshold = i64::from(prec.decimal_digits()) + 10;
    let floor = x.floor().to_integer().to_i64().unwrap_or(i64::MAX);
    let shift = (threshold - floor).max(0);
    (shift, x + int(shift))
}

/// Asymptotic Bernoulli sum `sum_{k>=1} B_2k * y^-(2k+offset) * weight(k)`,
/// stopped once the terms fall below the working precision.
fn bernoulli_tail(y: &BigFloat, offset: i64, weight: impl Fn(i64) -> BigRational) -> BigFloat {
    let prec = y.precision();
    let eps = BigFloat::ten_pow_neg(prec.decimal_digits() + super::float::GUARD_DIGITS / 2, prec);
    let one = BigFloat::one(prec);
    let inv = &one / y;
    let inv2 = inv.square();
    let mut power = (0..offset).fold(one.clone(), |acc, _| &acc * &inv);
    let mut sum = BigFloat::zero(prec);
    for k in 1..=(2 * i64::from(prec.decimal_digits()) + 40) {
        power = &power * &inv2;
        let coef = bernoulli(2 * k as usize) * weight(k);
        let term = power.mul_rational(&coef);
        if term.abs() < eps {
            break;
        }
        sum = &sum + &term;
    }
    sum
}

/// `psi'(x) = sum_{k>=0} 1/(x+k)^2` for rational `x > 0`.
///
/// The argument is lifted by the recurrence until it is large, and the tail
/// is summed by Euler–Maclaurin, whose remainder is bounded by the first
/// omitted term.
pub fn trigamma(x: &BigRational, prec: Precision) -> Result<BigFloat> {
    check_positive(x)?;
    let (shift, y) = lift(x, prec);
    let mut head = BigRational::zero();
    for j in 0..shift {
        let v = x + int(j);
        head += (&v * &v).recip();
    }
    let yf = BigFloat::from_rational(&y, prec);
    let one = BigFloat::one(prec);
    let inv = &one / &yf;
    let tail = &inv + &inv.square().div_int(2) + bernoulli_tail(&yf, 1, |_| int(1));
    Ok(BigFloat::from_rational(&head, prec) + tail)
}

/// `psi(x)` for rational `x > 0`.
pub fn digamma(x: &BigRational, prec: Precision) -> Result<BigFloat> {
    check_positive(x)?;
    let (shift, y) = lift(x, prec);
    let mut head = BigRational::zero();
    for j in 0..shift {
        head += (x + int(j)).recip();
    }
    let yf = BigFloat::from_rational(&y, prec);
    let asym = ln(&yf)?
        - (BigFloat::one(prec) / &yf).div_int(2)
        - bernoulli_tail(&yf, 0, |k| rat(1, 2 * k));
    Ok(asym - BigFloat::from_rational(&head, prec))
}

/// `pi^2/2 - psi'(n + 3/2) = 4 sum_{j=0}^{n} 1/(2j+1)^2`, exactly.
pub fn pi2_minus_trigamma_half(n: u64) -> BigRational {
    let mut acc = BigRational::zero();
    for j in 0..=n as i64 {
        acc += rat(1, (2 * j + 1) * (2 * j + 1));
    }
    acc * int(4)
}

fn in_unit_interval(x: &BigFloat) -> Result<()> {
    let one = BigFloat::one(x.precision());
    if x.abs() > one {
        return Err(SpecialError::Domain(format!(
            "dilogarithm argument {} outside [-1, 1]",
            x.to_decimal(6)
        )));
    }
    Ok(())
}

/// `sum x^k / k^2` for `|x| <= 1/2`.
fn li2_series(x: &BigFloat) -> BigFloat {
    let prec = x.precision();
    let mut power = x.clone();
    let mut sum = BigFloat::zero(prec);
    let mut k: i64 = 1;
    while !power.is_zero() {
        sum = &sum + &power.div_int(k * k);
        power = &power * x;
        k += 1;
    }
    sum
}

/// The dilogarithm on `[-1, 1]`.
pub fn li2(x: &BigFloat) -> Result<BigFloat> {
    in_unit_interval(x)?;
    let prec = x.precision();
    let one = BigFloat::one(prec);
    let half = BigFloat::from_rational(&rat(1, 2), prec);
    let pi2_6 = pi(prec).square().div_int(6);
    if x.is_negative() {
        // Landen: Li2(x) = -Li2(x/(x-1)) - ln^2(1-x)/2, with x/(x-1) in (0, 1/2]
        let y = x / &(x - &one);
        let l = ln(&(&one - x))?;
        return Ok(-li2_series(&y) - l.square().div_int(2));
    }
    if *x <= half {
        return Ok(li2_series(x));
    }
    if *x == one {
        return Ok(pi2_6);
    }
    // reflection: Li2(x) = pi^2/6 - ln(x) ln(1-x) - Li2(1-x)
    let y = &one - x;
    Ok(pi2_6 - ln(x)? * ln(&y)? - li2_series(&y))
}

pub fn li2_rational(x: &BigRational, prec: Precision) -> Result<BigFloat> {
    li2(&BigFloat::from_rational(x, prec))
}

/// Residual `|LHS - RHS|` of the five-term relation
/// `Li2(x) - Li2(y) = Li2(y(1-x)/(x(1-y))) - Li2(y/x) - Li2((1-x)/(1-y))
///  + pi^2/6 - ln(x) ln((1-x)/(1-y))`.
pub fn li2_five_term(x: &BigFloat, y: &BigFloat) -> Result<BigFloat> {
    let prec = x.precision();
    let one = BigFloat::one(prec);
    if x.is_negative() || x.is_zero() || *x >= one {
        return Err(SpecialError::Domain(
            "five-term relation needs x in (0, 1)".into(),
        ));
    }
    if *y >= one {
        return Err(SpecialError::Domain(
            "five-term relation needs y < 1".into(),
        ));
    }
    let omx = &one - x;
    let omy = &one - y;
    let u = &(y * &omx) / &(x * &omy);
    let v = y / x;
    let w = &omx / &omy;
    for a in [y, &u, &v, &w] {
        in_unit_interval(a)?;
    }
    let lhs = li2(x)? - li2(y)?;
    let rhs = li2(&u)? - li2(&v)? - li2(&w)? + pi(prec).square().div_int(6) - ln(x)? * ln(&w)?;
    Ok((lhs - rhs).abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    const PI_60: &str = "3.141592653589793238462643383279502884197169399375105820974944";
    const LN2_50: &str = "0.69314718055994530941723212145817656807550013436025";
    const GAMMA_50: &str = "0.57721566490153286060651209008240243104215933593992";

    #[test]
    fn constants() {
        let p = Precision::digits(60);
        assert_eq!(pi(p).to_decimal(60), PI_60);
        assert_eq!(ln2(Precision::digits(50)).to_decimal(50), LN2_50);
        assert_eq!(euler_gamma(Precision::digits(50)).to_decimal(50), GAMMA_50);
    }

    #[test]
    fn ln_values() {
        let p = Precision::digits(50);
        assert!(ln(&BigFloat::one(p)).unwrap().is_zero());
        let l10 = ln_rational(&int(10), p).unwrap();
        assert_eq!(l10.to_decimal(30), "2.302585092994045684017991454684");
        let lsmall = ln_rational(&rat(1, 1000), p).unwrap();
        assert!(lsmall.within(&(-l10.mul_int(3)), 48));
        assert!(ln(&BigFloat::zero(p)).is_err());
    }

    #[test]
    fn trigamma_values() {
        let p = Precision::digits(40);
        let pi2 = pi(p).square();
        assert!(trigamma(&int(1), p).unwrap().within(&pi2.div_int(6), 40));
        assert!(trigamma(&rat(1, 2), p).unwrap().within(&pi2.div_int(2), 40));
        let expect = pi2.div_int(2) - BigFloat::from_rational(&rat(40, 9), p);
        assert!(trigamma(&rat(5, 2), p).unwrap().within(&expect, 40));
        assert!(trigamma(&int(0), p).is_err());
    }

    #[test]
    fn trigamma_half_reduction() {
        assert_eq!(pi2_minus_trigamma_half(0), int(4));
        assert_eq!(pi2_minus_trigamma_half(1), rat(40, 9));
        assert_eq!(pi2_minus_trigamma_half(2), rat(1036, 225));
    }

    #[test]
    fn digamma_values() {
        let p = Precision::digits(50);
        let g = euler_gamma(p);
        let one = BigFloat::one(p);
        let psi1 = digamma(&int(1), p).unwrap();
        assert!(psi1.within(&-g.clone(), 50));
        assert!((digamma(&int(2), p).unwrap() - &psi1).within(&one, 50));
        let half = digamma(&rat(1, 2), p).unwrap() - &psi1;
        assert!(half.within(&-ln2(p).mul_int(2), 50));
    }

    #[test]
    fn dilogarithm_special_values() {
        let p = Precision::digits(50);
        let pi2 = pi(p).square();
        assert!(li2(&BigFloat::zero(p)).unwrap().is_zero());
        assert!(li2_rational(&int(-1), p)
            .unwrap()
            .within(&-pi2.div_int(12), 45));
        assert!(li2_rational(&rat(1, 2), p)
            .unwrap()
            .within(&(pi2.div_int(12) - ln2(p).square().div_int(2)), 45));
        let phi = (BigFloat::from_int(5, p).sqrt() - BigFloat::one(p)).div_int(2);
        let l = ln(&phi).unwrap().square();
        assert!(li2(&phi).unwrap().within(&(pi2.div_int(10) - &l), 45));
        assert!(li2(&-phi)
            .unwrap()
            .within(&(-pi2.div_int(15) + l.div_int(2)), 45));
        assert!(li2_rational(&int(2), p).is_err());
    }

    #[test]
    fn five_term_residuals() {
        let p = Precision::digits(50);
        let x = BigFloat::from_rational(&rat(3, 10), p);
        assert!(li2_five_term(&x, &x)
            .unwrap()
            .within(&BigFloat::zero(p), 45));
        let s5 = BigFloat::from_int(5, p).sqrt();
        let x = &s5 - &BigFloat::from_int(2, p);
        let y = BigFloat::from_int(2, p) - &s5;
        assert!(li2_five_term(&x, &y)
            .unwrap()
            .within(&BigFloat::zero(p), 45));
    }
}
