//! Exact values over a small basis of transcendental atoms, and transform
//! outputs built from them.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use super::{Result, RuleError};
use crate::exact::{int, BigRational, GammaValue};
use crate::hyper::{direct_sum, Pfq};
use crate::special::{self, BigFloat, Precision};

/// Dilogarithm arguments that occur in closed forms.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Li2Arg {
    Rational(BigRational),
    /// `sqrt(5) - 2`
    SqrtFiveMinusTwo,
    /// `2 - sqrt(5)`
    TwoMinusSqrtFive,
    /// `(sqrt(5) - 1) / 2`
    PhiInverse,
    /// `(1 - sqrt(5)) / 2`
    MinusPhiInverse,
}

impl Li2Arg {
    pub fn value(&self, prec: Precision) -> BigFloat {
        let s5 = || BigFloat::from_int(5, prec).sqrt();
        let two = BigFloat::from_int(2, prec);
        let one = BigFloat::one(prec);
        match self {
            Li2Arg::Rational(r) => BigFloat::from_rational(r, prec),
            Li2Arg::SqrtFiveMinusTwo => s5() - two,
            Li2Arg::TwoMinusSqrtFive => two - s5(),
            Li2Arg::PhiInverse => (s5() - one).div_int(2),
            Li2Arg::MinusPhiInverse => (one - s5()).div_int(2),
        }
    }
}

impl fmt::Display for Li2Arg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Li2Arg::Rational(r) => write!(f, "{r}"),
            Li2Arg::SqrtFiveMinusTwo => f.write_str("sqrt5-2"),
            Li2Arg::TwoMinusSqrtFive => f.write_str("2-sqrt5"),
            Li2Arg::PhiInverse => f.write_str("(sqrt5-1)/2"),
            Li2Arg::MinusPhiInverse => f.write_str("(1-sqrt5)/2"),
        }
    }
}

/// Transcendental basis elements.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AtomTag {
    /// `pi^2`
    Pi2,
    /// `psi'(n + 3/2)`
    TrigHalf(u64),
    /// `ln(2(sqrt2 - 1))`
    LnS5,
    /// `ln^2((sqrt5 - 1)/2)`
    LnSqPhi,
    Li2(Li2Arg),
    /// `pi^(e/2)` for `e != 0`
    PiPow(i32),
    /// `(4/z) ln(2(1 - sqrt(1-z))/z)`
    LnAlg365(BigRational),
    /// `z^(-1/2) [Li2(x) - Li2(-x)]` with `x = sqrt(z)/(1 + sqrt(1+z))`
    Eval413(BigRational),
}

impl AtomTag {
    pub fn value(&self, prec: Precision) -> Result<BigFloat> {
        let one = BigFloat::one(prec);
        Ok(match self {
            AtomTag::Pi2 => special::pi(prec).square(),
            AtomTag::TrigHalf(n) => special::trigamma(
                &(int(*n as i64) + BigRational::new(3.into(), 2.into())),
                prec,
            )?,
            AtomTag::LnS5 => {
                let s2 = BigFloat::from_int(2, prec).sqrt();
                special::ln(&(s2 - &one).mul_int(2))?
            }
            AtomTag::LnSqPhi => special::ln(&Li2Arg::PhiInverse.value(prec))?.square(),
            AtomTag::Li2(x) => special::li2(&x.value(prec))?,
            AtomTag::PiPow(e) => {
                let sp = special::pi(prec).sqrt();
                let mut v = one.clone();
                for _ in 0..e.unsigned_abs() {
                    v = &v * &sp;
                }
                if *e < 0 {
                    &one / &v
                } else {
                    v
                }
            }
            AtomTag::LnAlg365(z) => {
                if z.is_zero() || *z > int(1) {
                    return Err(RuleError::Domain(format!(
                        "closed form needs 0 != z <= 1, got {z}"
                    )));
                }
                let zf = BigFloat::from_rational(z, prec);
                let root = (&one - &zf).sqrt();
                let inner = (&one - &root).mul_int(2) / &zf;
                (special::ln(&inner)? / &zf).mul_int(4)
            }
            AtomTag::Eval413(z) => {
                if !z.is_positive() || *z > int(1) {
                    return Err(RuleError::Domain(format!(
                        "closed form needs 0 < z <= 1, got {z}"
                    )));
                }
                let zf = BigFloat::from_rational(z, prec);
                let sz = zf.sqrt();
                let x = &sz / &(&one + &(&one + &zf).sqrt());
                (special::li2(&x)? - special::li2(&-x)?) / sz
            }
        })
    }
}

impl fmt::Display for AtomTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AtomTag::Pi2 => f.write_str("pi^2"),
            AtomTag::TrigHalf(n) => write!(f, "psi'({n}+3/2)"),
            AtomTag::LnS5 => f.write_str("ln(2(sqrt2-1))"),
            AtomTag::LnSqPhi => f.write_str("ln^2((sqrt5-1)/2)"),
            AtomTag::Li2(x) => write!(f, "Li2({x})"),
            AtomTag::PiPow(e) => write!(f, "pi^({e}/2)"),
            AtomTag::LnAlg365(z) => write!(f, "(4/z)ln(2(1-sqrt(1-z))/z)[z={z}]"),
            AtomTag::Eval413(z) => write!(f, "z^(-1/2)(Li2(x)-Li2(-x))[z={z}]"),
        }
    }
}

/// `rational * pi^(sqrt_pi_exp/2) + sum coeff * atom`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ClosedValue {
    pub rational: BigRational,
    pub sqrt_pi_exp: i32,
    pub atoms: BTreeMap<AtomTag, BigRational>,
}

impl ClosedValue {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn rational(r: BigRational) -> Self {
        Self {
            rational: r,
            ..Default::default()
        }
    }

    pub fn atom(tag: AtomTag, coeff: BigRational) -> Self {
        let mut v = Self::zero();
        v.add_atom(tag, coeff);
        v
    }

    pub fn from_gamma(g: &GammaValue) -> Self {
        if g.coeff.is_zero() {
            return Self::zero();
        }
        Self {
            rational: g.coeff.clone(),
            sqrt_pi_exp: g.sqrt_pi_exp,
            atoms: BTreeMap::new(),
        }
    }

    fn add_atom(&mut self, tag: AtomTag, coeff: BigRational) {
        let slot = self
            .atoms
            .entry(tag.clone())
            .or_insert_with(BigRational::zero);
        *slot += coeff;
        if slot.is_zero() {
            self.atoms.remove(&tag);
        }
    }

    /// The exact rational value, when there is one.
    pub fn as_rational(&self) -> Option<BigRational> {
        (self.atoms.is_empty() && (self.sqrt_pi_exp == 0 || self.rational.is_zero()))
            .then(|| self.rational.clone())
    }

    pub fn is_zero(&self) -> bool {
        self.rational.is_zero() && self.atoms.is_empty()
    }

    /// Moves a nonzero power of pi into the atom part.
    fn flatten_pi(&mut self) {
        if self.sqrt_pi_exp != 0 && !self.rational.is_zero() {
            let r = std::mem::take(&mut self.rational);
            self.add_atom(AtomTag::PiPow(self.sqrt_pi_exp), r);
        }
        self.sqrt_pi_exp = 0;
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        let mut out = self.clone();
        out.rational *= r;
        for v in out.atoms.values_mut() {
            *v *= r;
        }
        out.atoms.retain(|_, v| !v.is_zero());
        if out.rational.is_zero() {
            out.sqrt_pi_exp = 0;
        }
        out
    }

    pub fn add(&self, other: &ClosedValue) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        if a.rational.is_zero() {
            a.sqrt_pi_exp = b.sqrt_pi_exp;
        } else if b.rational.is_zero() {
            b.sqrt_pi_exp = a.sqrt_pi_exp;
        }
        if a.sqrt_pi_exp != b.sqrt_pi_exp {
            a.flatten_pi();
            b.flatten_pi();
        }
        a.rational += b.rational;
        for (tag, c) in b.atoms {
            a.add_atom(tag, c);
        }
        if a.rational.is_zero() {
            a.sqrt_pi_exp = 0;
        }
        a
    }

    pub fn sub(&self, other: &ClosedValue) -> Self {
        self.add(&other.scale(&int(-1)))
    }

    /// Replaces every `psi'(n + 3/2)` by `pi^2/2 - 4 sum_{j<=n} 1/(2j+1)^2`.
    pub fn reduce_trigamma(&self) -> Self {
        let mut out = self.clone();
        let tags: Vec<AtomTag> = out
            .atoms
            .keys()
            .filter(|t| matches!(t, AtomTag::TrigHalf(_)))
            .cloned()
            .collect();
        for tag in tags {
            let d = out.atoms.remove(&tag).expect("present");
            let AtomTag::TrigHalf(n) = tag else {
                unreachable!()
            };
            out.add_atom(AtomTag::Pi2, &d / int(2));
            let r = special::pi2_minus_trigamma_half(n);
            out = out.add(&ClosedValue::rational(-(d * r)));
        }
        out
    }

    pub fn to_bigfloat(&self, prec: Precision) -> Result<BigFloat> {
        let mut acc = BigFloat::from_rational(&self.rational, prec);
        if self.sqrt_pi_exp != 0 {
            acc = &acc * &AtomTag::PiPow(self.sqrt_pi_exp).value(prec)?;
        }
        for (tag, c) in &self.atoms {
            acc = &acc + &tag.value(prec)?.mul_rational(c);
        }
        Ok(acc)
    }
}

impl From<BigRational> for ClosedValue {
    fn from(r: BigRational) -> Self {
        ClosedValue::rational(r)
    }
}

impl fmt::Display for ClosedValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        if !self.rational.is_zero() || self.atoms.is_empty() {
            let base = self.rational.to_string();
            parts.push(match self.sqrt_pi_exp {
                0 => base,
                e => format!("{base}*pi^({e}/2)"),
            });
        }
        for (tag, c) in &self.atoms {
            if c.is_one() {
                parts.push(tag.to_string());
            } else {
                parts.push(format!("{c}*{tag}"));
            }
        }
        f.write_str(&parts.join(" + "))
    }
}

impl Serialize for ClosedValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// `addend + sum scale_i * series_i`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TransformExpr {
    pub nodes: Vec<(ClosedValue, Pfq)>,
    pub addend: Option<ClosedValue>,
}

impl TransformExpr {
    pub fn value(v: ClosedValue) -> Self {
        Self {
            nodes: Vec::new(),
            addend: Some(v),
        }
    }

    pub fn single(scale: ClosedValue, series: Pfq) -> Self {
        Self {
            nodes: vec![(scale, series)],
            addend: None,
        }
    }

    pub fn with_addend(mut self, v: ClosedValue) -> Self {
        self.addend = Some(match self.addend {
            Some(a) => a.add(&v),
            None => v,
        });
        self
    }

    /// Exact value when every series terminates.
    pub fn evaluate_exact(&self) -> Result<ClosedValue> {
        let mut acc = self.addend.clone().unwrap_or_default();
        for (scale, series) in &self.nodes {
            let s = direct_sum(series, None)?;
            acc = acc.add(&scale.scale(&s));
        }
        Ok(acc)
    }

    /// Numerical value; non-terminating series are summed numerically.
    pub fn evaluate_numeric(&self, prec: Precision) -> Result<BigFloat> {
        let mut acc = match &self.addend {
            Some(a) => a.to_bigfloat(prec)?,
            None => BigFloat::zero(prec),
        };
        for (scale, series) in &self.nodes {
            let s = special::eval_pfq_numeric(series, prec, 200_000)?;
            acc = &acc + &(&scale.to_bigfloat(prec)? * &s);
        }
        Ok(acc)
    }
}

impl fmt::Display for TransformExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self
            .nodes
            .iter()
            .map(|(c, s)| format!("({c})*{s}"))
            .collect();
        if let Some(a) = &self.addend {
            parts.push(a.to_string());
        }
        if parts.is_empty() {
            parts.push("0".into());
        }
        f.write_str(&parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    #[test]
    fn rational_values_add_exactly() {
        let a = ClosedValue::rational(rat(1, 2));
        let b = ClosedValue::rational(rat(1, 3));
        assert_eq!(a.add(&b).as_rational(), Some(rat(5, 6)));
        assert!(a.sub(&a).is_zero());
    }

    #[test]
    fn pi_powers_stay_exact() {
        let g = ClosedValue::from_gamma(&GammaValue::new(rat(1, 2), 2));
        assert_eq!(g.as_rational(), None);
        let twice = g.add(&g);
        assert_eq!(twice.sqrt_pi_exp, 2);
        assert_eq!(twice.rational, int(1));
        let mixed = g.add(&ClosedValue::rational(int(1)));
        assert_eq!(mixed.rational, int(1));
        assert_eq!(mixed.atoms.get(&AtomTag::PiPow(2)), Some(&rat(1, 2)));
        let p = Precision::digits(30);
        let v = mixed.to_bigfloat(p).unwrap();
        let expect = special::pi(p).div_int(2) + BigFloat::one(p);
        assert!(v.within(&expect, 30));
    }

    #[test]
    fn trigamma_reduction() {
        // psi'(5/2) = pi^2/2 - 40/9
        let v = ClosedValue::atom(AtomTag::TrigHalf(1), int(1)).reduce_trigamma();
        assert_eq!(v.rational, rat(-40, 9));
        assert_eq!(v.atoms.get(&AtomTag::Pi2), Some(&rat(1, 2)));
        let cancel = ClosedValue::atom(AtomTag::Pi2, rat(1, 2))
            .sub(&ClosedValue::atom(AtomTag::TrigHalf(1), int(1)))
            .reduce_trigamma();
        assert_eq!(cancel.as_rational(), Some(rat(40, 9)));
    }
}
