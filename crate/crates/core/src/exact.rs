//! Exact rational arithmetic and the gamma / Pochhammer / binomial calculus.
//!
//! Every value in the exact layer is a [`BigRational`]. Gamma values are closed
//! over integer and half-odd arguments as `rational * pi^(e/2)`, see
//! [`GammaValue`].

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Div, Mul};
use std::sync::{Arc, RwLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

pub use num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactError {
    #[error("gamma pole at {0}")]
    Pole(BigRational),
    #[error("gamma argument {0} is neither an integer nor a half-odd integer")]
    NotHalfInteger(BigRational),
    #[error("gamma ratio is not closed over rationals and powers of sqrt(pi)")]
    NotClosed,
}

/// Shorthand for the rational `p/q`.
pub fn rat(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

/// Shorthand for the integer `p` as a rational.
pub fn int(p: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(p))
}

pub fn is_integer(x: &BigRational) -> bool {
    x.denom().is_one()
}

/// True when `x` is 0, -1, -2, ...
pub fn is_nonpositive_integer(x: &BigRational) -> bool {
    is_integer(x) && !x.is_positive()
}

/// `x` as an `i64` when it is an integer that fits.
pub fn to_i64(x: &BigRational) -> Option<i64> {
    if is_integer(x) {
        x.numer().to_i64()
    } else {
        None
    }
}

/// `x` as an `f64`, for diagnostics only.
pub fn to_f64(x: &BigRational) -> f64 {
    x.numer().to_f64().unwrap_or(f64::NAN) / x.denom().to_f64().unwrap_or(f64::NAN)
}

/// Rising factorial `(a)_k = a (a+1) ... (a+k-1)`.
pub fn pochhammer(a: &BigRational, k: u64) -> BigRational {
    let mut acc = BigRational::one();
    let mut x = a.clone();
    for _ in 0..k {
        if x.is_zero() {
            return BigRational::zero();
        }
        acc *= &x;
        x += BigRational::one();
    }
    acc
}

/// Pochhammer symbol with a signed index: `(a)_{-j} = 1/((a-1)(a-2)...(a-j))`.
pub fn pochhammer_signed(a: &BigRational, k: i64) -> Result<BigRational, ExactError> {
    if k >= 0 {
        return Ok(pochhammer(a, k as u64));
    }
    let j = k.unsigned_abs();
    let den = pochhammer(&(a - int(j as i64)), j);
    if den.is_zero() {
        return Err(ExactError::Pole(a.clone()));
    }
    Ok(den.recip())
}

static FACTORIALS: RwLock<Vec<BigInt>> = RwLock::new(Vec::new());

/// `n!`, served from a process-wide table that grows on demand.
pub fn factorial(n: u64) -> BigInt {
    let idx = n as usize;
    {
        let table = FACTORIALS.read().expect("factorial table poisoned");
        if let Some(v) = table.get(idx) {
            return v.clone();
        }
    }
    let mut table = FACTORIALS.write().expect("factorial table poisoned");
    if table.is_empty() {
        table.push(BigInt::one());
    }
    while table.len() <= idx {
        let next = table.last().unwrap() * BigInt::from(table.len() as u64);
        table.push(next);
    }
    table[idx].clone()
}

/// Rows of Pascal's triangle up to this `n` are cached.
const BINOMIAL_ROW_LIMIT: i64 = 1024;

static BINOMIAL_ROWS: RwLock<BTreeMap<usize, Arc<Vec<BigInt>>>> = RwLock::new(BTreeMap::new());

/// Row `n` of Pascal's triangle, built by `C(n,k+1) = C(n,k)(n-k)/(k+1)`.
fn binomial_row(n: usize) -> Arc<Vec<BigInt>> {
    if let Some(row) = BINOMIAL_ROWS
        .read()
        .expect("binomial table poisoned")
        .get(&n)
    {
        return Arc::clone(row);
    }
    let mut row = Vec::with_capacity(n + 1);
    let mut c = BigInt::one();
    for k in 0..=n {
        row.push(c.clone());
        c = c * (n - k) / (k + 1);
    }
    let row = Arc::new(row);
    BINOMIAL_ROWS
        .write()
        .expect("binomial table poisoned")
        .insert(n, Arc::clone(&row));
    row
}

/// Binomial coefficient in the Pochhammer form `(-1)^k (-n)_k / k!`.
///
/// Zero for `k < 0`, and zero for `k > n` when `n >= 0`. A negative `n`
/// follows the same Pochhammer form, so `binomial(-1, k) = (-1)^k`.
pub fn binomial(n: i64, k: i64) -> BigRational {
    if k < 0 {
        return BigRational::zero();
    }
    if n >= 0 {
        if k > n {
            return BigRational::zero();
        }
        if n <= BINOMIAL_ROW_LIMIT {
            return BigRational::from_integer(binomial_row(n as usize)[k as usize].clone());
        }
        let num = factorial(n as u64);
        let den = factorial(k as u64) * factorial((n - k) as u64);
        return BigRational::from_integer(num / den);
    }
    // (-1)^k (-n)_k / k! = C(k - n - 1, k) (-1)^k
    let v = binomial(k - n - 1, k);
    if k % 2 == 0 {
        v
    } else {
        -v
    }
}

/// An exact number `coeff * pi^(sqrt_pi_exp / 2)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GammaValue {
    pub coeff: BigRational,
    pub sqrt_pi_exp: i32,
}

impl GammaValue {
    pub fn new(coeff: BigRational, sqrt_pi_exp: i32) -> Self {
        if coeff.is_zero() {
            return Self::zero();
        }
        Self { coeff, sqrt_pi_exp }
    }

    pub fn zero() -> Self {
        Self {
            coeff: BigRational::zero(),
            sqrt_pi_exp: 0,
        }
    }

    pub fn one() -> Self {
        Self::rational(BigRational::one())
    }

    pub fn rational(coeff: BigRational) -> Self {
        Self::new(coeff, 0)
    }

    /// `sqrt(pi)^e`.
    pub fn sqrt_pi_pow(e: i32) -> Self {
        Self::new(BigRational::one(), e)
    }

    pub fn is_zero(&self) -> bool {
        self.coeff.is_zero()
    }

    /// The plain rational, if no power of `sqrt(pi)` remains.
    pub fn to_rational(&self) -> Option<BigRational> {
        (self.sqrt_pi_exp == 0 || self.coeff.is_zero()).then(|| self.coeff.clone())
    }

    pub fn recip(&self) -> Option<Self> {
        (!self.is_zero()).then(|| Self::new(self.coeff.recip(), -self.sqrt_pi_exp))
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        Self::new(&self.coeff * r, self.sqrt_pi_exp)
    }
}

impl Mul for &GammaValue {
    type Output = GammaValue;
    fn mul(self, rhs: &GammaValue) -> GammaValue {
        GammaValue::new(&self.coeff * &rhs.coeff, self.sqrt_pi_exp + rhs.sqrt_pi_exp)
    }
}

impl Mul for GammaValue {
    type Output = GammaValue;
    fn mul(self, rhs: GammaValue) -> GammaValue {
        &self * &rhs
    }
}

impl Div for &GammaValue {
    type Output = GammaValue;
    /// Panics on division by zero, like rational division.
    fn div(self, rhs: &GammaValue) -> GammaValue {
        GammaValue::new(&self.coeff / &rhs.coeff, self.sqrt_pi_exp - rhs.sqrt_pi_exp)
    }
}

impl Div for GammaValue {
    type Output = GammaValue;
    fn div(self, rhs: GammaValue) -> GammaValue {
        &self / &rhs
    }
}

impl fmt::Display for GammaValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sqrt_pi_exp {
            0 => write!(f, "{}", self.coeff),
            e if e % 2 == 0 => write!(f, "{}*pi^{}", self.coeff, e / 2),
            e => write!(f, "{}*sqrt(pi)^{}", self.coeff, e),
        }
    }
}

/// Gamma at an integer or half-odd argument.
pub fn gamma_half_integer(x: &BigRational) -> Result<GammaValue, ExactError> {
    let two_x = x * int(2);
    if !is_integer(&two_x) {
        return Err(ExactError::NotHalfInteger(x.clone()));
    }
    if is_integer(x) {
        if !x.is_positive() {
            return Err(ExactError::Pole(x.clone()));
        }
        let n = x.numer().to_u64().ok_or(ExactError::NotClosed)?;
        return Ok(GammaValue::rational(BigRational::from_integer(factorial(
            n - 1,
        ))));
    }
    let half = rat(1, 2);
    if x.is_positive() {
        // x = j + 1/2: Gamma(x) = (1/2)_j sqrt(pi)
        let j = (x - &half).numer().to_u64().ok_or(ExactError::NotClosed)?;
        return Ok(GammaValue::new(pochhammer(&half, j), 1));
    }
    // reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x), sin(pi x) = (-1)^(x - 1/2)
    let mirror = gamma_half_integer(&(BigRational::one() - x))?;
    let parity = (x - &half).numer().is_odd();
    let sign = if parity { int(-1) } else { int(1) };
    Ok(&GammaValue::new(sign, 2) / &mirror)
}

/// `2^(2k) Gamma(k + 1/2) / (sqrt(pi) Gamma(k + 1))`, which equals `C(2k, k)`.
pub fn central_binomial_gamma(k: u64) -> GammaValue {
    let kk = int(k as i64);
    let top = gamma_half_integer(&(&kk + rat(1, 2))).expect("positive half-odd argument");
    let bottom = gamma_half_integer(&(&kk + int(1))).expect("positive integer argument");
    let pow = BigRational::from_integer(BigInt::one() << (2 * k) as usize);
    (&top / &bottom).scale(&pow) * GammaValue::sqrt_pi_pow(-1)
}

/// Exact value of `prod Gamma(num_i) / prod Gamma(den_j)`.
///
/// Arguments are grouped by their class modulo 1. Within a class, numerator
/// and denominator arguments are paired in sorted order and each pair
/// collapses to a (signed-index) Pochhammer symbol, which also resolves
/// matched poles as limits. Unpaired arguments must be integers or half-odd
/// integers. A leftover denominator pole makes the product 0; a leftover
/// numerator pole is an error.
pub fn gamma_ratio(num: &[BigRational], den: &[BigRational]) -> Result<GammaValue, ExactError> {
    let mut classes: BTreeMap<BigRational, (Vec<BigRational>, Vec<BigRational>)> = BTreeMap::new();
    for x in num {
        classes.entry(frac_part(x)).or_default().0.push(x.clone());
    }
    for x in den {
        classes.entry(frac_part(x)).or_default().1.push(x.clone());
    }
    let mut acc = GammaValue::one();
    let mut zero = false;
    let mut pole: Option<BigRational> = None;
    for (_, (mut ns, mut ds)) in classes {
        ns.sort();
        ds.sort();
        let paired = ns.len().min(ds.len());
        // pair the largest arguments so leftovers are the smallest
        let ns_rest: Vec<BigRational> = ns.drain(..ns.len() - paired).collect();
        let ds_rest: Vec<BigRational> = ds.drain(..ds.len() - paired).collect();
        for (a, b) in ns.iter().zip(ds.iter()) {
            // Gamma(a)/Gamma(b) = (b)_{a-b}
            let shift = to_i64(&(a - b)).ok_or(ExactError::NotClosed)?;
            match pochhammer_signed(b, shift) {
                Ok(v) => acc = acc.scale(&v),
                Err(_) => pole = Some(a.clone()),
            }
        }
        for a in &ns_rest {
            match gamma_half_integer(a) {
                Ok(g) => acc = &acc * &g,
                Err(ExactError::Pole(p)) => pole = Some(p),
                Err(_) => return Err(ExactError::NotClosed),
            }
        }
        for b in &ds_rest {
            match gamma_half_integer(b) {
                Ok(g) => acc = &acc / &g,
                Err(ExactError::Pole(_)) => zero = true,
                Err(_) => return Err(ExactError::NotClosed),
            }
        }
    }
    if let Some(p) = pole {
        return Err(ExactError::Pole(p));
    }
    if zero {
        return Ok(GammaValue::zero());
    }
    Ok(acc)
}

fn frac_part(x: &BigRational) -> BigRational {
    x - x.floor()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pochhammer_examples() {
        assert_eq!(pochhammer(&rat(7, 3), 0), int(1));
        assert_eq!(pochhammer(&int(1), 4), int(24));
        assert_eq!(pochhammer(&rat(1, 2), 3), rat(15, 8));
        assert_eq!(pochhammer(&int(-2), 3), int(0));
    }

    #[test]
    fn signed_pochhammer() {
        assert_eq!(pochhammer_signed(&int(5), -1).unwrap(), rat(1, 4));
        assert_eq!(pochhammer_signed(&int(5), -2).unwrap(), rat(1, 12));
        assert!(pochhammer_signed(&int(1), -1).is_err());
    }

    #[test]
    fn binomial_examples() {
        assert_eq!(binomial(5, 2), int(10));
        assert_eq!(binomial(0, 0), int(1));
        assert_eq!(binomial(4, 2), int(6));
        assert_eq!(binomial(3, 4), int(0));
        assert_eq!(binomial(3, -1), int(0));
        assert_eq!(binomial(-1, 3), int(-1));
        assert_eq!(binomial(-1, 0), int(1));
        // Pochhammer form agrees on the nonnegative range
        for n in 0..12i64 {
            for k in 0..=n {
                let p = pochhammer(&int(-n), k as u64) / pochhammer(&int(1), k as u64);
                let signed = if k % 2 == 0 { p } else { -p };
                assert_eq!(binomial(n, k), signed);
            }
        }
    }

    #[test]
    fn binomial_via_gamma_form() {
        // C(4,2) = 2^4/sqrt(pi) * Gamma(5/2)/Gamma(3)
        let g = &gamma_half_integer(&rat(5, 2)).unwrap() / &gamma_half_integer(&int(3)).unwrap();
        let v = g.scale(&int(16)) * GammaValue::sqrt_pi_pow(-1);
        assert_eq!(v.to_rational(), Some(int(6)));
    }

    #[test]
    fn gamma_examples() {
        assert_eq!(
            gamma_half_integer(&rat(1, 2)).unwrap(),
            GammaValue::new(int(1), 1)
        );
        assert_eq!(
            gamma_half_integer(&rat(5, 2)).unwrap(),
            GammaValue::new(rat(3, 4), 1)
        );
        assert_eq!(
            gamma_half_integer(&rat(-1, 2)).unwrap(),
            GammaValue::new(int(-2), 1)
        );
        assert_eq!(
            gamma_half_integer(&rat(-3, 2)).unwrap(),
            GammaValue::new(rat(4, 3), 1)
        );
        assert_eq!(
            gamma_half_integer(&int(5)).unwrap(),
            GammaValue::rational(int(24))
        );
        assert_eq!(gamma_half_integer(&int(0)), Err(ExactError::Pole(int(0))));
        assert_eq!(gamma_half_integer(&int(-3)), Err(ExactError::Pole(int(-3))));
        assert!(matches!(
            gamma_half_integer(&rat(1, 3)),
            Err(ExactError::NotHalfInteger(_))
        ));
    }

    #[test]
    fn central_binomial_examples() {
        assert_eq!(central_binomial_gamma(0).to_rational(), Some(int(1)));
        assert_eq!(central_binomial_gamma(2).to_rational(), Some(int(6)));
        assert_eq!(central_binomial_gamma(5).to_rational(), Some(int(252)));
    }

    #[test]
    fn gamma_ratio_cases() {
        // Gamma(7/3)/Gamma(1/3) = (1/3)(4/3)
        assert_eq!(
            gamma_ratio(&[rat(7, 3)], &[rat(1, 3)]).unwrap(),
            GammaValue::rational(rat(4, 9))
        );
        // leftover half-odd numerator
        assert_eq!(
            gamma_ratio(&[rat(1, 2)], &[]).unwrap(),
            GammaValue::new(int(1), 1)
        );
        // leftover denominator pole gives 0
        assert!(gamma_ratio(&[int(2)], &[int(-1)]).unwrap().is_zero());
        // leftover numerator pole is an error
        assert!(gamma_ratio(&[int(0)], &[int(3)]).is_err());
        // matched poles: Gamma(-1)/Gamma(-3) = (-3)(-2) = 6
        assert_eq!(
            gamma_ratio(&[int(-1)], &[int(-3)]).unwrap(),
            GammaValue::rational(int(6))
        );
        assert_eq!(gamma_ratio(&[rat(1, 3)], &[]), Err(ExactError::NotClosed));
    }
}
