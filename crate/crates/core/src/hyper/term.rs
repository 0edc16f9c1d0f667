//! Summand specifications for binomial sums and the ASCII term language.
//!
//! ```text
//! term    := factor (('*'|'/') factor)*
//! factor  := primary ['^' ['-'] integer]
//! primary := 'binom' '(' affine ',' affine ')'
//!          | 'pow' '(' rational ',' 'k' ')'
//!          | '(' term ')'
//!          | affine
//! affine  := ['+'|'-'] aterm (('+'|'-') aterm)*
//! aterm   := integer [atom] | atom
//! atom    := 'n' | 'm' | 'k' | '(' affine ')'
//! ```
//!
//! `k` is the summation index; `n` and `m` are parameters. Whitespace is
//! insignificant.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{HyperError, Result};
use crate::exact::{self, int, BigRational};

/// `n_coeff * n + m_coeff * m + k_coeff * k + constant`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Affine {
    pub n: BigRational,
    pub m: BigRational,
    pub k: BigRational,
    pub c: BigRational,
}

/// Values of the summand parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Params {
    pub n: i64,
    pub m: i64,
}

impl Params {
    pub fn n(n: i64) -> Self {
        Self { n, m: 0 }
    }

    pub fn nm(n: i64, m: i64) -> Self {
        Self { n, m }
    }
}

impl Affine {
    pub fn constant(c: BigRational) -> Self {
        Self {
            c,
            ..Default::default()
        }
    }

    pub fn var_k() -> Self {
        Self {
            k: int(1),
            ..Default::default()
        }
    }

    pub fn is_constant(&self) -> bool {
        self.n.is_zero() && self.m.is_zero() && self.k.is_zero()
    }

    /// Value with `k` left free: returns `(k coefficient, remaining constant)`.
    pub fn at_params(&self, p: Params) -> (BigRational, BigRational) {
        let c = &self.n * int(p.n) + &self.m * int(p.m) + &self.c;
        (self.k.clone(), c)
    }

    pub fn eval(&self, p: Params, k: i64) -> BigRational {
        let (b, c) = self.at_params(p);
        b * int(k) + c
    }

    fn add(&self, o: &Affine) -> Affine {
        Affine {
            n: &self.n + &o.n,
            m: &self.m + &o.m,
            k: &self.k + &o.k,
            c: &self.c + &o.c,
        }
    }

    fn scale(&self, s: &BigRational) -> Affine {
        Affine {
            n: &self.n * s,
            m: &self.m * s,
            k: &self.k * s,
            c: &self.c * s,
        }
    }

    /// Substitutes `k -> offset + sign * k`.
    pub fn substitute_k(&self, offset: &BigRational, sign: i64) -> Affine {
        Affine {
            c: &self.c + &self.k * offset,
            k: &self.k * int(sign),
            ..self.clone()
        }
    }
}

impl fmt::Display for Affine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        for (coef, name) in [
            (&self.n, "n"),
            (&self.m, "m"),
            (&self.k, "k"),
            (&self.c, ""),
        ] {
            if coef.is_zero() {
                continue;
            }
            let neg = coef.is_negative();
            let mag = coef.abs();
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push(if neg { '-' } else { '+' });
            }
            if name.is_empty() || !mag.is_one() {
                out.push_str(&mag.to_string());
            }
            out.push_str(name);
        }
        if out.is_empty() {
            out.push('0');
        }
        f.write_str(&out)
    }
}

/// One multiplicative factor of a summand, raised to a signed exponent.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Factor {
    /// `binom(top, bottom)^exp`.
    Binom {
        top: Affine,
        bottom: Affine,
        exp: i32,
    },
    /// `base^(exp * k)`.
    Pow {
        base: BigRational,
        exp: i32,
    },
    /// `lin^exp`; negative exponents place the factor in the denominator.
    Lin {
        lin: Affine,
        exp: i32,
    },
    Const(BigRational),
}

impl Factor {
    fn exp(&self) -> i32 {
        match self {
            Factor::Binom { exp, .. } | Factor::Pow { exp, .. } | Factor::Lin { exp, .. } => *exp,
            Factor::Const(_) => 1,
        }
    }

    fn with_exp(&self, e: i32) -> Factor {
        match self {
            Factor::Binom { top, bottom, .. } => Factor::Binom {
                top: top.clone(),
                bottom: bottom.clone(),
                exp: e,
            },
            Factor::Pow { base, .. } => Factor::Pow {
                base: base.clone(),
                exp: e,
            },
            Factor::Lin { lin, .. } => Factor::Lin {
                lin: lin.clone(),
                exp: e,
            },
            Factor::Const(c) => Factor::Const(c.clone()),
        }
    }

    fn same_base(&self, o: &Factor) -> bool {
        match (self, o) {
            (
                Factor::Binom {
                    top: a, bottom: b, ..
                },
                Factor::Binom {
                    top: c, bottom: d, ..
                },
            ) => a == c && b == d,
            (Factor::Pow { base: a, .. }, Factor::Pow { base: b, .. }) => a == b,
            (Factor::Lin { lin: a, .. }, Factor::Lin { lin: b, .. }) => a == b,
            _ => false,
        }
    }

    /// Raises the factor to `e`.
    fn powi(&self, e: i32) -> Factor {
        match self {
            Factor::Const(c) => Factor::Const(pow_rat(c, e)),
            other => other.with_exp(other.exp() * e),
        }
    }
}

fn pow_rat(c: &BigRational, e: i32) -> BigRational {
    let p = num_traits::pow::pow(c.clone(), e.unsigned_abs() as usize);
    if e < 0 {
        p.recip()
    } else {
        p
    }
}

/// A summand as a product of factors.
///
/// Canonical form: at most one [`Factor::Const`], placed first and omitted
/// when it equals 1 unless it is the only factor; repeated factors are merged
/// by adding exponents.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TermSpec {
    pub factors: Vec<Factor>,
}

impl TermSpec {
    pub fn new(factors: Vec<Factor>) -> Self {
        let mut c = BigRational::one();
        let mut rest: Vec<Factor> = Vec::new();
        for f in factors {
            match f {
                Factor::Const(v) => c *= v,
                other => {
                    if let Some(prev) = rest.iter_mut().find(|p| p.same_base(&other)) {
                        *prev = prev.with_exp(prev.exp() + other.exp());
                    } else {
                        rest.push(other);
                    }
                }
            }
        }
        rest.retain(|f| f.exp() != 0);
        let mut out = Vec::with_capacity(rest.len() + 1);
        if !c.is_one() || rest.is_empty() {
            out.push(Factor::Const(c));
        }
        out.extend(rest);
        Self { factors: out }
    }

    /// Rewrites the summand under `k -> offset + sign * k`.
    pub fn substitute_k(&self, offset: i64, sign: i64) -> Result<TermSpec> {
        let off = int(offset);
        let mut out = Vec::with_capacity(self.factors.len() + 1);
        for f in &self.factors {
            match f {
                Factor::Binom { top, bottom, exp } => out.push(Factor::Binom {
                    top: top.substitute_k(&off, sign),
                    bottom: bottom.substitute_k(&off, sign),
                    exp: *exp,
                }),
                Factor::Lin { lin, exp } => out.push(Factor::Lin {
                    lin: lin.substitute_k(&off, sign),
                    exp: *exp,
                }),
                Factor::Pow { base, exp } => {
                    if base.is_zero() {
                        return Err(HyperError::NotHypergeometric("pow with zero base".into()));
                    }
                    let total = i32::try_from(offset * i64::from(*exp))
                        .map_err(|_| HyperError::NotHypergeometric("exponent overflow".into()))?;
                    out.push(Factor::Const(pow_rat(base, total)));
                    let b = if sign < 0 { base.recip() } else { base.clone() };
                    out.push(Factor::Pow { base: b, exp: *exp });
                }
                Factor::Const(c) => out.push(Factor::Const(c.clone())),
            }
        }
        Ok(TermSpec::new(out))
    }
}

impl fmt::Display for TermSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        for fac in &self.factors {
            let e = fac.exp();
            let op = if e < 0 { '/' } else { '*' };
            let body = match fac {
                Factor::Const(c) => c.to_string(),
                Factor::Binom { top, bottom, .. } => format!("binom({top},{bottom})"),
                Factor::Pow { base, .. } => format!("pow({base},k)"),
                Factor::Lin { lin, .. } => format!("({lin})"),
            };
            let reps = match fac {
                Factor::Binom { .. } | Factor::Pow { .. } => e.unsigned_abs() as usize,
                _ => 1,
            };
            let body = match fac {
                Factor::Lin { .. } if e.abs() != 1 => format!("{body}^{}", e.abs()),
                _ => body,
            };
            for _ in 0..reps {
                if out.is_empty() {
                    if e < 0 {
                        out.push_str("1/");
                    }
                } else {
                    out.push(op);
                }
                out.push_str(&body);
            }
        }
        f.write_str(&out)
    }
}

/// A sum `sum_{k=start}^{end} term(k)` at concrete parameter values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SumSpec {
    pub term: TermSpec,
    pub start: i64,
    /// `None` for an infinite sum.
    pub end: Option<i64>,
    pub params: Params,
}

impl SumSpec {
    pub fn new(term: TermSpec, start: i64, end: Option<i64>, params: Params) -> Self {
        Self {
            term,
            start,
            end,
            params,
        }
    }

    /// Number of terms minus one, for finite sums.
    pub fn last_offset(&self) -> Option<u64> {
        self.end.map(|e| (e - self.start).max(0) as u64)
    }
}

fn integer_arg(x: &BigRational, k: i64) -> Result<i64> {
    if !exact::is_integer(x) {
        return Err(HyperError::NonIntegerBinomial(k));
    }
    x.numer().to_i64().ok_or(HyperError::NonIntegerBinomial(k))
}

/// Exact value of the summand at index `k`. Out-of-range binomials are 0.
///
/// Numerator and denominator are accumulated as integers and reduced once;
/// reducing big integers against 1 is slow with binary gcd, so integer results
/// skip the reduction entirely.
pub fn term_value(spec: &TermSpec, params: Params, k: i64) -> Result<BigRational> {
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    let mut push = |v: &BigRational, e: i64| {
        let (a, b) = (
            num_traits::pow::pow(v.numer().clone(), e.unsigned_abs() as usize),
            num_traits::pow::pow(v.denom().clone(), e.unsigned_abs() as usize),
        );
        if e >= 0 {
            num *= a;
            den *= b;
        } else {
            num *= b;
            den *= a;
        }
    };
    for f in &spec.factors {
        match f {
            Factor::Const(c) => push(c, 1),
            Factor::Binom { top, bottom, exp } => {
                let t = integer_arg(&top.eval(params, k), k)?;
                let b = integer_arg(&bottom.eval(params, k), k)?;
                push(&exact::binomial(t, b), i64::from(*exp));
            }
            Factor::Pow { base, exp } => push(base, i64::from(*exp) * k),
            Factor::Lin { lin, exp } => push(&lin.eval(params, k), i64::from(*exp)),
        }
    }
    if den.is_zero() {
        return Err(HyperError::DivisionByZero(k));
    }
    if num.is_zero() {
        return Ok(BigRational::zero());
    }
    if den.is_one() {
        return Ok(BigRational::from_integer(num));
    }
    if den == -BigInt::one() {
        return Ok(BigRational::from_integer(-num));
    }
    Ok(BigRational::new(num, den))
}

// ---------------------------------------------------------------------------
// parser

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Sym(char),
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            out.push((start, Tok::Int(s.parse().expect("digits"))));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((start, Tok::Ident(chars[start..i].iter().collect())));
        } else if "+-*/^(),".contains(c) {
            out.push((i, Tok::Sym(c)));
            i += 1;
        } else {
            return Err(HyperError::Syntax {
                pos: i,
                msg: format!("unexpected character '{c}'"),
            });
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    len: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|(p, _)| *p).unwrap_or(self.len)
    }

    fn err<T>(&self, msg: &str) -> Result<T> {
        Err(HyperError::Syntax {
            pos: self.offset(),
            msg: msg.to_string(),
        })
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            self.err(&format!("expected '{c}'"))
        }
    }

    fn term(&mut self) -> Result<Vec<Factor>> {
        let mut out = self.factor()?;
        loop {
            if self.eat('*') {
                out.extend(self.factor()?);
            } else if self.eat('/') {
                out.extend(self.factor()?.iter().map(|f| f.powi(-1)));
            } else {
                return Ok(out);
            }
        }
    }

    fn factor(&mut self) -> Result<Vec<Factor>> {
        let base = self.primary()?;
        if self.eat('^') {
            let neg = self.eat('-');
            let e = match self.peek() {
                Some(Tok::Int(v)) => {
                    let v = v.to_i32().ok_or(HyperError::Syntax {
                        pos: self.offset(),
                        msg: "exponent too large".into(),
                    })?;
                    self.pos += 1;
                    if neg {
                        -v
                    } else {
                        v
                    }
                }
                _ => return self.err("expected integer exponent"),
            };
            return Ok(base.iter().map(|f| f.powi(e)).collect());
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Vec<Factor>> {
        match self.peek().cloned() {
            Some(Tok::Ident(name)) if name == "binom" => {
                self.pos += 1;
                self.expect('(')?;
                let top = self.affine()?;
                self.expect(',')?;
                let bottom = self.affine()?;
                self.expect(')')?;
                Ok(vec![Factor::Binom {
                    top,
                    bottom,
                    exp: 1,
                }])
            }
            Some(Tok::Ident(name)) if name == "pow" => {
                self.pos += 1;
                self.expect('(')?;
                let base = self.rational()?;
                self.expect(',')?;
                match self.peek() {
                    Some(Tok::Ident(v)) if v == "k" => self.pos += 1,
                    _ => return self.err("pow exponent must be 'k'"),
                }
                self.expect(')')?;
                Ok(vec![Factor::Pow { base, exp: 1 }])
            }
            Some(Tok::Sym('(')) => {
                self.pos += 1;
                let inner = self.term()?;
                self.expect(')')?;
                Ok(inner)
            }
            _ => {
                let a = self.affine()?;
                if a.is_constant() {
                    Ok(vec![Factor::Const(a.c)])
                } else {
                    Ok(vec![Factor::Lin { lin: a, exp: 1 }])
                }
            }
        }
    }

    fn rational(&mut self) -> Result<BigRational> {
        let neg = self.eat('-');
        let num = match self.peek() {
            Some(Tok::Int(v)) => v.clone(),
            _ => return self.err("expected integer"),
        };
        self.pos += 1;
        let mut r = BigRational::from_integer(num);
        if self.eat('/') {
            match self.peek() {
                Some(Tok::Int(v)) if !v.is_zero() => {
                    r /= BigRational::from_integer(v.clone());
                    self.pos += 1;
                }
                _ => return self.err("expected nonzero denominator"),
            }
        }
        Ok(if neg { -r } else { r })
    }

    fn affine(&mut self) -> Result<Affine> {
        let mut acc = Affine::default();
        let mut sign = int(1);
        if self.eat('-') {
            sign = int(-1);
        } else {
            self.eat('+');
        }
        loop {
            let t = self.aterm()?;
            acc = acc.add(&t.scale(&sign));
            if self.eat('+') {
                sign = int(1);
            } else if self.eat('-') {
                sign = int(-1);
            } else {
                return Ok(acc);
            }
        }
    }

    fn aterm(&mut self) -> Result<Affine> {
        if let Some(Tok::Int(v)) = self.peek().cloned() {
            self.pos += 1;
            let coef = BigRational::from_integer(v);
            return match self.peek() {
                Some(Tok::Ident(_)) | Some(Tok::Sym('(')) => Ok(self.atom()?.scale(&coef)),
                _ => Ok(Affine::constant(coef)),
            };
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Affine> {
        let at = self.offset();
        match self.peek().cloned() {
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                let one = int(1);
                match name.as_str() {
                    "n" => Ok(Affine {
                        n: one,
                        ..Default::default()
                    }),
                    "m" => Ok(Affine {
                        m: one,
                        ..Default::default()
                    }),
                    "k" => Ok(Affine {
                        k: one,
                        ..Default::default()
                    }),
                    _ => Err(HyperError::UnknownSymbol { pos: at, name }),
                }
            }
            Some(Tok::Sym('(')) => {
                self.pos += 1;
                let a = self.affine()?;
                self.expect(')')?;
                Ok(a)
            }
            _ => self.err("expected n, m, k, integer or '('"),
        }
    }
}

/// Parses a summand in the term language.
pub fn parse_term_spec(text: &str) -> Result<TermSpec> {
    let toks = tokenize(text)?;
    if toks.is_empty() {
        return Err(HyperError::Syntax {
            pos: 0,
            msg: "empty term".into(),
        });
    }
    let mut p = Parser {
        toks,
        pos: 0,
        len: text.len(),
    };
    let factors = p.term()?;
    if p.pos != p.toks.len() {
        return p.err("unexpected trailing input");
    }
    Ok(TermSpec::new(factors))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;
    use proptest::prelude::*;

    #[test]
    fn parses_s0_summand() {
        let t = parse_term_spec("binom(2k,k)*binom(2(n-k),n-k)/(1+2k)").unwrap();
        assert_eq!(t.factors.len(), 3);
        assert!(matches!(&t.factors[2], Factor::Lin { exp: -1, .. }));
        assert_eq!(term_value(&t, Params::n(1), 1).unwrap(), rat(2, 3));
    }

    #[test]
    fn parses_constant_one() {
        let t = parse_term_spec("1").unwrap();
        assert_eq!(t.factors, vec![Factor::Const(int(1))]);
    }

    #[test]
    fn parses_s5_summand() {
        let t = parse_term_spec("pow(-1,k)*binom(2k,k)/(k*pow(4,k))").unwrap();
        assert_eq!(t.factors.len(), 4);
        assert_eq!(term_value(&t, Params::default(), 1).unwrap(), rat(-1, 2));
        assert_eq!(term_value(&t, Params::default(), 2).unwrap(), rat(6, 32));
    }

    #[test]
    fn s8_term_value() {
        let t = parse_term_spec("binom(n+k,k)/pow(2,k)").unwrap();
        assert_eq!(term_value(&t, Params::n(2), 1).unwrap(), rat(3, 2));
    }

    #[test]
    fn out_of_range_binomial_is_zero() {
        let t = parse_term_spec("binom(n,k)").unwrap();
        assert_eq!(term_value(&t, Params::n(2), 3).unwrap(), int(0));
    }

    #[test]
    fn division_by_zero() {
        let t = parse_term_spec("1/(n-k)").unwrap();
        assert_eq!(
            term_value(&t, Params::n(2), 2),
            Err(HyperError::DivisionByZero(2))
        );
    }

    #[test]
    fn syntax_errors() {
        assert!(matches!(
            parse_term_spec("binom(2k,"),
            Err(HyperError::Syntax { .. })
        ));
        assert!(matches!(
            parse_term_spec("binom(k,k))"),
            Err(HyperError::Syntax { .. })
        ));
        assert!(matches!(
            parse_term_spec("pow(2,n)"),
            Err(HyperError::Syntax { .. })
        ));
        assert!(matches!(
            parse_term_spec("k$"),
            Err(HyperError::Syntax { pos: 1, .. })
        ));
        assert_eq!(
            parse_term_spec("binom(x,k)"),
            Err(HyperError::UnknownSymbol {
                pos: 6,
                name: "x".into()
            })
        );
    }

    #[test]
    fn powers_and_groups() {
        let t = parse_term_spec("1/((n-k+1)^2*binom(2k,k))").unwrap();
        assert_eq!(term_value(&t, Params::n(1), 1).unwrap(), rat(1, 2));
        let u = parse_term_spec("(k+1)^-2").unwrap();
        assert_eq!(term_value(&u, Params::default(), 1).unwrap(), rat(1, 4));
    }

    #[test]
    fn display_round_trip_examples() {
        for text in [
            "binom(2k,k)*binom(2(n-k),n-k)/(1+2k)",
            "pow(-1,k)*binom(2k,k)/(k*pow(4,k))",
            "k^2*binom(2n,n-k)*binom(2n,n-k)/n^2",
            "3/4*pow(1/2,k)/binom(2k,k)",
            "1",
        ] {
            let t = parse_term_spec(text).unwrap();
            let printed = t.to_string();
            assert_eq!(parse_term_spec(&printed).unwrap(), t, "{text} -> {printed}");
        }
    }

    fn arb_affine() -> impl Strategy<Value = Affine> {
        (-3i64..=3, -2i64..=2, -3i64..=3, -5i64..=5).prop_map(|(n, m, k, c)| Affine {
            n: int(n),
            m: int(m),
            k: int(k),
            c: int(c),
        })
    }

    fn arb_factor() -> impl Strategy<Value = Factor> {
        prop_oneof![
            (
                arb_affine(),
                arb_affine(),
                prop_oneof![Just(1), Just(-1), Just(2)]
            )
                .prop_map(|(top, bottom, exp)| Factor::Binom { top, bottom, exp }),
            (
                (-5i64..=5).prop_filter("nonzero", |b| *b != 0),
                1i64..=4,
                prop_oneof![Just(1), Just(-1)]
            )
                .prop_map(|(p, q, exp)| Factor::Pow {
                    base: rat(p, q),
                    exp
                }),
            (
                arb_affine(),
                prop_oneof![Just(1), Just(-1), Just(2), Just(-3)]
            )
                .prop_filter("non-constant", |(a, _)| !a.is_constant())
                .prop_map(|(lin, exp)| Factor::Lin { lin, exp }),
            ((-9i64..=9), 1i64..=5).prop_map(|(p, q)| Factor::Const(rat(p, q))),
        ]
    }

    proptest! {
        #[test]
        fn print_parse_is_identity(factors in prop::collection::vec(arb_factor(), 1..5)) {
            let t = TermSpec::new(factors);
            let printed = t.to_string();
            let back = parse_term_spec(&printed).unwrap();
            prop_assert_eq!(back, t, "{}", printed);
        }
    }
}
