//! Recognition of a binomial sum as `prefactor * pFq`.
//!
//! Each factor of the summand contributes linear factors `(beta*k + c)` to
//! the numerator or denominator of `t_{k+1}/t_k`, read off its gamma-function
//! form at the instantiated parameters. Common roots cancel, and the `k!`
//! convention supplies the denominator `(k+1)`. When the forward reading is
//! not a valid series (a lower parameter hits zero before the sum ends) the
//! index is reversed; when the leading terms vanish the series is regularized.

use num_traits::{One, ToPrimitive, Zero};

use super::term::{term_value, Affine, Factor, Params, SumSpec, TermSpec};
use super::{direct_sum, HyperError, Pfq, Result};
use crate::exact::{int, is_integer, is_nonpositive_integer, BigRational};

/// `prefactor * direct_sum(series, terms)` equals the sum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Recognized {
    pub prefactor: BigRational,
    pub series: Pfq,
    /// Index of the last term for finite sums.
    pub terms: Option<u64>,
    /// True when the series runs over the summation range backwards.
    pub reversed: bool,
}

impl Recognized {
    /// Exact value of a finite sum through its series.
    pub fn exact_sum(&self) -> Result<BigRational> {
        Ok(&self.prefactor * direct_sum(&self.series, self.terms)?)
    }
}

/// Term-by-term sum over a finite range.
pub fn naive_sum(sum: &SumSpec) -> Result<BigRational> {
    let end = sum.end.ok_or(HyperError::NotTerminating)?;
    // integer terms are kept apart to avoid a gcd per addition
    let mut whole = num_bigint::BigInt::zero();
    let mut acc = BigRational::zero();
    for k in sum.start..=end {
        let t = term_value(&sum.term, sum.params, k)?;
        if t.is_integer() {
            whole += t.to_integer();
        } else {
            acc += t;
        }
    }
    Ok(acc + BigRational::from_integer(whole))
}

/// Linear factors of the ratio, as `scale * prod(k + num) / prod(k + den)`.
#[derive(Default)]
struct RatioFactors {
    scale: BigRational,
    num: Vec<BigRational>,
    den: Vec<BigRational>,
}

impl RatioFactors {
    fn new() -> Self {
        Self {
            scale: BigRational::one(),
            ..Default::default()
        }
    }

    /// Adds `(beta*k + c)^sign`; constant factors only scale.
    fn push(&mut self, beta: &BigRational, c: &BigRational, sign: i32) {
        if beta.is_zero() {
            if sign > 0 {
                self.scale *= c;
            } else {
                self.scale /= c;
            }
            return;
        }
        let root = c / beta;
        if sign > 0 {
            self.scale *= beta;
            self.num.push(root);
        } else {
            self.scale /= beta;
            self.den.push(root);
        }
    }

    /// `Gamma(beta*k + c + gamma + 1) / Gamma(beta*k + c + 1)` for integer `gamma`.
    fn push_gamma_shift(&mut self, beta: &BigRational, c: &BigRational, gamma: i64, sign: i32) {
        if gamma > 0 {
            for i in 1..=gamma {
                self.push(beta, &(c + int(i)), sign);
            }
        } else {
            for i in 0..-gamma {
                self.push(beta, &(c - int(i)), -sign);
            }
        }
    }
}

fn integer_slope(a: &Affine) -> Result<i64> {
    if !is_integer(&a.k) {
        return Err(HyperError::NotHypergeometric(format!(
            "non-integer slope in binomial argument {a}"
        )));
    }
    a.k.to_integer()
        .to_i64()
        .ok_or_else(|| HyperError::NotHypergeometric("slope too large".into()))
}

fn ratio_factors(term: &TermSpec, params: Params) -> Result<RatioFactors> {
    let mut rf = RatioFactors::new();
    for f in &term.factors {
        match f {
            Factor::Const(_) => {}
            Factor::Pow { base, exp } => {
                if base.is_zero() {
                    return Err(HyperError::NotHypergeometric("pow with zero base".into()));
                }
                let p = num_traits::pow::pow(base.clone(), exp.unsigned_abs() as usize);
                rf.scale *= if *exp < 0 { p.recip() } else { p };
            }
            Factor::Lin { lin, exp } => {
                let (b, c) = lin.at_params(params);
                let s = exp.signum();
                for _ in 0..exp.unsigned_abs() {
                    rf.push(&b, &(&c + &b), s);
                    rf.push(&b, &c, -s);
                }
            }
            Factor::Binom { top, bottom, exp } => {
                let alpha = integer_slope(top)?;
                let beta = integer_slope(bottom)?;
                let (_, t) = top.at_params(params);
                let (_, b) = bottom.at_params(params);
                if !is_integer(&t) || !is_integer(&b) {
                    return Err(HyperError::NotHypergeometric(format!(
                        "binom({top},{bottom}) is not integral"
                    )));
                }
                let s = exp.signum();
                let d = &t - &b;
                for _ in 0..exp.unsigned_abs() {
                    rf.push_gamma_shift(&int(alpha), &t, alpha, s);
                    rf.push_gamma_shift(&int(beta), &b, beta, -s);
                    rf.push_gamma_shift(&int(alpha - beta), &d, alpha - beta, -s);
                }
            }
        }
    }
    Ok(rf)
}

/// Series parameters from the ratio: cancel common roots and apply the `k!`
/// convention.
fn series_parameters(mut rf: RatioFactors) -> (Vec<BigRational>, Vec<BigRational>, BigRational) {
    let mut upper = Vec::new();
    for a in rf.num.drain(..) {
        if let Some(i) = rf.den.iter().position(|b| *b == a) {
            rf.den.swap_remove(i);
        } else {
            upper.push(a);
        }
    }
    let one = BigRational::one();
    match rf.den.iter().position(|b| *b == one) {
        Some(i) => {
            rf.den.swap_remove(i);
        }
        None => upper.push(one),
    }
    upper.sort();
    rf.den.sort_by(|a, b| b.cmp(a));
    (upper, rf.den, rf.scale)
}

/// Compares the candidate against the summand on a few leading terms and the
/// last one.
fn agrees(term: &TermSpec, params: Params, cand: &Recognized) -> Result<bool> {
    let last = cand.terms.unwrap_or(12).min(u64::MAX - 1);
    let mut ks: Vec<u64> = (0..=last.min(6)).collect();
    if last > 6 {
        ks.push(last);
    }
    for k in ks {
        let expect = term_value(term, params, k as i64)?;
        let got = match cand.series.term(k) {
            Ok(v) => &cand.prefactor * v,
            Err(_) => return Ok(false),
        };
        if got != expect {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Recognition of `sum_{k=0}^{last} term(k)`.
fn recognize_from_zero(term: &TermSpec, params: Params, last: Option<u64>) -> Result<Recognized> {
    let (upper, lower, arg) = series_parameters(ratio_factors(term, params)?);
    let t0 = term_value(term, params, 0)?;
    if !t0.is_zero() {
        let series = Pfq::new(upper, lower, arg)?;
        let cand = Recognized {
            prefactor: t0,
            series,
            terms: last,
            reversed: false,
        };
        return Ok(cand);
    }
    // leading terms vanish: look for a regularizing lower parameter
    let horizon = last.unwrap_or(64);
    let mut j0 = None;
    for j in 1..=horizon {
        if !term_value(term, params, j as i64)?.is_zero() {
            j0 = Some(j);
            break;
        }
    }
    let j0 = match j0 {
        Some(j) => j,
        None if last.is_some() => {
            // every term vanishes
            let series = Pfq::new(vec![int(0)], vec![], int(0))?;
            return Ok(Recognized {
                prefactor: BigRational::zero(),
                series,
                terms: last,
                reversed: false,
            });
        }
        None => return Err(HyperError::ZeroLeadingTerm),
    };
    let target = -int(j0 as i64 - 1);
    let hits = lower
        .iter()
        .filter(|b| is_nonpositive_integer(b))
        .collect::<Vec<_>>();
    if hits.len() != 1 || *hits[0] != target {
        return Err(HyperError::ZeroLeadingTerm);
    }
    let series = Pfq::regularized(upper, lower, arg)?;
    let reg = series.term(j0)?;
    if reg.is_zero() {
        return Err(HyperError::ZeroLeadingTerm);
    }
    let prefactor = term_value(term, params, j0 as i64)? / reg;
    Ok(Recognized {
        prefactor,
        series,
        terms: last,
        reversed: false,
    })
}

/// Recognizes a sum as `prefactor * pFq`.
///
/// Sums starting away from 0 are shifted first. For finite sums whose forward
/// reading is invalid, the index-reversed sum is tried.
pub fn recognize(sum: &SumSpec) -> Result<Recognized> {
    if let Some(end) = sum.end {
        if end < sum.start {
            return Err(HyperError::InvalidSeries(format!(
                "empty range {}..{}",
                sum.start, end
            )));
        }
    }
    let shifted = sum.term.substitute_k(sum.start, 1)?;
    let last = sum.last_offset();
    let forward = recognize_from_zero(&shifted, sum.params, last);
    match (&forward, last) {
        (Ok(cand), _) if agrees(&shifted, sum.params, cand)? => return forward,
        (_, None) => {
            return match forward {
                Ok(_) => Err(HyperError::NotHypergeometric(
                    "recognized series disagrees with the summand".into(),
                )),
                Err(e) => Err(e),
            }
        }
        _ => {}
    }
    let last = last.expect("finite");
    let backward_term = sum.term.substitute_k(sum.start + last as i64, -1)?;
    match recognize_from_zero(&backward_term, sum.params, Some(last)) {
        Ok(mut cand) if agrees(&backward_term, sum.params, &cand)? => {
            cand.reversed = true;
            Ok(cand)
        }
        Ok(_) => Err(HyperError::NotHypergeometric(
            "no valid series reading of the summand".into(),
        )),
        Err(e) => match forward {
            Err(f) => Err(f),
            Ok(_) => Err(e),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;
    use crate::hyper::{classify, parse_term_spec};

    fn sum(text: &str, start: i64, end: Option<i64>, params: Params) -> SumSpec {
        SumSpec::new(parse_term_spec(text).unwrap(), start, end, params)
    }

    fn sorted(v: &[BigRational]) -> Vec<BigRational> {
        let mut v = v.to_vec();
        v.sort();
        v
    }

    #[test]
    fn s8_is_1f0() {
        let s = sum("binom(n+k,k)/pow(2,k)", 0, Some(3), Params::n(3));
        let r = recognize(&s).unwrap();
        assert_eq!(r.prefactor, int(1));
        assert_eq!(r.series.upper(), &[int(4)]);
        assert!(r.series.lower().is_empty());
        assert_eq!(r.series.arg(), &rat(1, 2));
        assert_eq!(r.exact_sum().unwrap(), int(8));
        assert!(!r.reversed);
    }

    #[test]
    fn constant_term() {
        let s = sum("1", 0, Some(1), Params::n(1));
        let r = recognize(&s).unwrap();
        assert_eq!(r.prefactor, int(1));
        assert_eq!(r.series.upper(), &[int(1)]);
        assert!(r.series.lower().is_empty());
        assert_eq!(r.series.arg(), &int(1));
        assert_eq!(r.exact_sum().unwrap(), int(2));
        let longer = sum("1", 0, Some(4), Params::n(4));
        assert_eq!(recognize(&longer).unwrap().exact_sum().unwrap(), int(5));
    }

    #[test]
    fn s0_at_one() {
        let s = sum(
            "binom(2k,k)*binom(2(n-k),n-k)/(1+2k)",
            0,
            Some(1),
            Params::n(1),
        );
        let r = recognize(&s).unwrap();
        assert_eq!(r.prefactor, int(2));
        assert_eq!(
            sorted(r.series.upper()),
            vec![int(-1), rat(1, 2), rat(1, 2)]
        );
        assert_eq!(sorted(r.series.lower()), vec![rat(-1, 2), rat(3, 2)]);
        assert_eq!(r.series.arg(), &int(1));
        assert!(classify(&r.series).saalschutzian);
        assert_eq!(r.exact_sum().unwrap(), rat(8, 3));
    }

    #[test]
    fn s1_is_reversed() {
        let text = "binom(2k,k)/(pow(16,k)*(n-k+1)^2*binom(2(n-k+1),n-k+1))";
        let n = 4;
        let s = sum(text, 0, Some(n), Params::n(n));
        let r = recognize(&s).unwrap();
        assert!(r.reversed);
        assert_eq!(
            sorted(r.series.upper()),
            vec![int(-n), int(1), int(1), int(1)]
        );
        assert_eq!(
            sorted(r.series.lower()),
            vec![rat(1, 2) - int(n), rat(3, 2), int(2)]
        );
        assert_eq!(r.exact_sum().unwrap(), naive_sum(&s).unwrap());
    }

    #[test]
    fn s4_is_regularized() {
        let s = sum("binom(2n+1,2k)*binom(k,m)", 0, Some(5), Params::nm(5, 3));
        let r = recognize(&s).unwrap();
        assert!(r.series.is_regularized());
        assert_eq!(r.series.regularized_m(), Some(2));
        assert_eq!(sorted(r.series.upper()), vec![rat(-11, 2), int(-5), int(1)]);
        assert_eq!(sorted(r.series.lower()), vec![int(-2), rat(1, 2)]);
        let terms = r.series.terms_upto(5).unwrap();
        assert!(terms[..3].iter().all(Zero::is_zero));
        assert_eq!(r.exact_sum().unwrap(), naive_sum(&s).unwrap());
    }

    #[test]
    fn s5_shifted_start() {
        let s = sum(
            "pow(-1,k)*binom(2k,k)/(k*pow(4,k))",
            1,
            None,
            Params::default(),
        );
        let r = recognize(&s).unwrap();
        assert_eq!(r.prefactor, rat(-1, 2));
        assert_eq!(sorted(r.series.upper()), vec![int(1), int(1), rat(3, 2)]);
        assert_eq!(sorted(r.series.lower()), vec![int(2), int(2)]);
        assert_eq!(r.series.arg(), &int(-1));
    }

    #[test]
    fn rejects_fractional_slope() {
        let s = sum("binom(n,k)", 0, Some(2), Params::n(2));
        assert!(recognize(&s).is_ok());
        let bad = TermSpec::new(vec![Factor::Binom {
            top: Affine {
                k: rat(1, 2),
                ..Default::default()
            },
            bottom: Affine::constant(int(0)),
            exp: 1,
        }]);
        let s = SumSpec::new(bad, 0, Some(2), Params::n(2));
        assert!(matches!(
            recognize(&s),
            Err(HyperError::NotHypergeometric(_))
        ));
    }

    #[test]
    fn s7_starting_at_one() {
        let s = sum(
            "k^2*binom(2n,n-k)*binom(2n,n-k)/n^2",
            1,
            Some(2),
            Params::n(2),
        );
        let r = recognize(&s).unwrap();
        assert_eq!(r.exact_sum().unwrap(), int(5));
    }
}
