//! Concrete generalized hypergeometric series and the surgery performed on
//! them: classification, exact partial sums, reversal and tail splitting.
//!
//! Term specifications for binomial sums and their recognition as series
//! live in [`term`] and [`recognize`].

pub mod recognize;
pub mod term;

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::exact::{self, int, is_nonpositive_integer, BigRational, ExactError};

pub use recognize::{naive_sum, recognize, Recognized};
pub use term::{parse_term_spec, term_value, Affine, Factor, Params, SumSpec, TermSpec};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HyperError {
    #[error("series does not terminate and no truncation was given")]
    NotTerminating,
    #[error("series diverges at its argument")]
    Divergent,
    #[error("invalid series: {0}")]
    InvalidSeries(String),
    #[error("zero denominator in term {0}")]
    Pole(u64),
    #[error("summand is not hypergeometric: {0}")]
    NotHypergeometric(String),
    #[error("ratio polynomial does not split into rational linear factors")]
    IrrationalRoots,
    #[error("leading term vanishes and no regularized form applies")]
    ZeroLeadingTerm,
    #[error("division by zero in summand at k = {0}")]
    DivisionByZero(i64),
    #[error("binomial argument is not an integer at k = {0}")]
    NonIntegerBinomial(i64),
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown symbol '{name}' at {pos}")]
    UnknownSymbol { pos: usize, name: String },
    #[error(transparent)]
    Exact(#[from] ExactError),
}

pub type Result<T> = std::result::Result<T, HyperError>;

/// A concrete series `pFq(upper; lower; arg)`, optionally regularized by the
/// gamma function of its single nonpositive-integer lower parameter.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Pfq {
    upper: Vec<BigRational>,
    lower: Vec<BigRational>,
    arg: BigRational,
    regularized: bool,
}

/// Outcome of [`classify`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    pub terminating: bool,
    pub truncation: Option<u64>,
    /// `sum(lower) - sum(upper)`.
    pub balance: BigRational,
    pub saalschutzian: bool,
}

impl Pfq {
    /// Builds a plain series. A nonpositive-integer lower parameter `-M` is
    /// accepted only when some upper parameter terminates the series at
    /// `N <= M`, before any zero denominator is reached.
    pub fn new(upper: Vec<BigRational>, lower: Vec<BigRational>, arg: BigRational) -> Result<Self> {
        let s = Self {
            upper,
            lower,
            arg,
            regularized: false,
        };
        let n = s.truncation();
        for b in &s.lower {
            if is_nonpositive_integer(b) {
                let m = b.numer().abs().to_u64().unwrap_or(u64::MAX);
                match n {
                    Some(n) if n <= m => {}
                    _ => {
                        return Err(HyperError::InvalidSeries(format!(
                            "lower parameter {b} is reached before termination"
                        )))
                    }
                }
            }
        }
        Ok(s)
    }

    /// Builds the series divided by `Gamma(-M)`, where `-M` is the single
    /// nonpositive-integer lower parameter. Terms `k <= M` vanish.
    pub fn regularized(
        upper: Vec<BigRational>,
        lower: Vec<BigRational>,
        arg: BigRational,
    ) -> Result<Self> {
        let count = lower.iter().filter(|b| is_nonpositive_integer(b)).count();
        if count != 1 {
            return Err(HyperError::InvalidSeries(format!(
                "regularized series needs exactly one nonpositive-integer lower parameter, found {count}"
            )));
        }
        Ok(Self {
            upper,
            lower,
            arg,
            regularized: true,
        })
    }

    pub fn upper(&self) -> &[BigRational] {
        &self.upper
    }

    pub fn lower(&self) -> &[BigRational] {
        &self.lower
    }

    pub fn arg(&self) -> &BigRational {
        &self.arg
    }

    pub fn is_regularized(&self) -> bool {
        self.regularized
    }

    pub fn p(&self) -> usize {
        self.upper.len()
    }

    pub fn q(&self) -> usize {
        self.lower.len()
    }

    /// `M` for a regularized series with lower parameter `-M`.
    pub fn regularized_m(&self) -> Option<u64> {
        if !self.regularized {
            return None;
        }
        self.lower
            .iter()
            .find(|b| is_nonpositive_integer(b))
            .and_then(|b| b.numer().abs().to_u64())
    }

    /// Smallest `N` with an upper parameter `-N`.
    pub fn truncation(&self) -> Option<u64> {
        self.upper
            .iter()
            .filter(|a| is_nonpositive_integer(a))
            .filter_map(|a| a.numer().abs().to_u64())
            .min()
    }

    pub fn balance(&self) -> BigRational {
        let lo: BigRational = self.lower.iter().cloned().sum();
        let up: BigRational = self.upper.iter().cloned().sum();
        lo - up
    }

    /// `t_{k+1} / t_k` for the plain series, including the `1/(k+1)` from `k!`.
    pub fn ratio(&self, k: u64) -> Result<BigRational> {
        let kk = int(k as i64);
        let mut num = self.arg.clone();
        for a in &self.upper {
            num *= a + &kk;
        }
        let mut den = &kk + int(1);
        for b in &self.lower {
            den *= b + &kk;
        }
        if den.is_zero() {
            return Err(HyperError::Pole(k + 1));
        }
        Ok(num / den)
    }

    /// Term `k` computed directly from Pochhammer symbols.
    pub fn term(&self, k: u64) -> Result<BigRational> {
        let mut v = self.arg_pow(k);
        for a in &self.upper {
            v *= exact::pochhammer(a, k);
        }
        let mut den = BigRational::from_integer(exact::factorial(k));
        let reg = self.regularized_m();
        let mut skipped = false;
        for b in &self.lower {
            if reg.is_some() && !skipped && is_nonpositive_integer(b) {
                skipped = true;
                let m = reg.unwrap();
                if k <= m {
                    return Ok(BigRational::zero());
                }
                den *= BigRational::from_integer(exact::factorial(k - m - 1));
                continue;
            }
            den *= exact::pochhammer(b, k);
        }
        if den.is_zero() {
            return Err(HyperError::Pole(k));
        }
        Ok(v / den)
    }

    fn arg_pow(&self, k: u64) -> BigRational {
        num_traits::pow::pow(self.arg.clone(), k as usize)
    }

    /// Iterates `t_0, t_1, ...` up to and including `last`.
    pub fn terms_upto(&self, last: u64) -> Result<Vec<BigRational>> {
        let mut out = Vec::with_capacity(last as usize + 1);
        let start = match self.regularized_m() {
            Some(m) => {
                for _ in 0..=m.min(last) {
                    out.push(BigRational::zero());
                }
                if m >= last {
                    return Ok(out);
                }
                m + 1
            }
            None => 0,
        };
        let mut t = self.term(start)?;
        out.push(t.clone());
        for k in start..last {
            if t.is_zero() {
                out.push(BigRational::zero());
                continue;
            }
            t *= self.ratio(k)?;
            out.push(t.clone());
        }
        Ok(out)
    }
}

impl fmt::Display for Pfq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[BigRational]| {
            v.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        write!(
            f,
            "{}F{}{}({};{};{})",
            self.p(),
            self.q(),
            if self.regularized { "~" } else { "" },
            join(&self.upper),
            join(&self.lower),
            self.arg
        )
    }
}

impl FromStr for Pfq {
    type Err = HyperError;

    /// Parses `pFq(a1,...;b1,...;z)` with rational entries; `pFq~(...)`
    /// denotes the regularized series.
    fn from_str(s: &str) -> Result<Self> {
        let syntax = |pos: usize, msg: &str| HyperError::Syntax {
            pos,
            msg: msg.to_string(),
        };
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let open = compact.find('(').ok_or_else(|| syntax(0, "expected '('"))?;
        if !compact.ends_with(')') {
            return Err(syntax(compact.len(), "expected ')'"));
        }
        let head = &compact[..open];
        let (head, regularized) = match head.strip_suffix('~') {
            Some(h) => (h, true),
            None => (head, false),
        };
        let fpos = head
            .find(['F', 'f'])
            .ok_or_else(|| syntax(0, "expected pFq prefix"))?;
        let p: usize = head[..fpos].parse().map_err(|_| syntax(0, "bad p"))?;
        let q: usize = head[fpos + 1..]
            .parse()
            .map_err(|_| syntax(fpos + 1, "bad q"))?;
        let body = &compact[open + 1..compact.len() - 1];
        let parts: Vec<&str> = body.split(';').collect();
        if parts.len() != 3 {
            return Err(syntax(open + 1, "expected two ';' separators"));
        }
        let list = |text: &str, offset: usize| -> Result<Vec<BigRational>> {
            if text.is_empty() {
                return Ok(vec![]);
            }
            text.split(',')
                .map(|x| parse_rational(x).ok_or_else(|| syntax(offset, "bad rational")))
                .collect()
        };
        let upper = list(parts[0], open + 1)?;
        let lower = list(parts[1], open + 1)?;
        let arg = parse_rational(parts[2]).ok_or_else(|| syntax(open + 1, "bad argument"))?;
        if upper.len() != p || lower.len() != q {
            return Err(syntax(0, "parameter counts do not match pFq prefix"));
        }
        if regularized {
            Pfq::regularized(upper, lower, arg)
        } else {
            Pfq::new(upper, lower, arg)
        }
    }
}

/// Parses `p`, `-p` or `p/q`.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((a, b)) => {
            let num: BigInt = a.trim().parse().ok()?;
            let den: BigInt = b.trim().parse().ok()?;
            (!den.is_zero()).then(|| BigRational::new(num, den))
        }
        None => s.parse::<BigInt>().ok().map(BigRational::from_integer),
    }
}

pub fn classify(series: &Pfq) -> Classification {
    let truncation = series.truncation();
    let terminating = truncation.is_some();
    let balance = series.balance();
    let saalschutzian = terminating && series.arg.is_one() && balance.is_one();
    Classification {
        terminating,
        truncation,
        balance,
        saalschutzian,
    }
}

/// Exact partial sum `sum_{k=0}^{N}` where `N` is the truncation of the
/// series, capped by `truncate_at` when given.
pub fn direct_sum(series: &Pfq, truncate_at: Option<u64>) -> Result<BigRational> {
    let last = match (series.truncation(), truncate_at) {
        (Some(n), Some(t)) => n.min(t),
        (Some(n), None) => n,
        (None, Some(t)) => t,
        (None, None) => return Err(HyperError::NotTerminating),
    };
    let start = match series.regularized_m() {
        Some(m) if m >= last => return Ok(BigRational::zero()),
        Some(m) => m + 1,
        None => 0,
    };
    let mut t = series.term(start)?;
    let mut sum = t.clone();
    for k in start..last {
        if t.is_zero() {
            break;
        }
        t *= series.ratio(k)?;
        sum += &t;
    }
    Ok(sum)
}

/// Reversal of a terminating series: `prefactor * reversed` sums the same
/// terms from the last one down.
pub fn reverse(series: &Pfq) -> Result<(BigRational, Pfq)> {
    let n = series.truncation().ok_or(HyperError::NotTerminating)?;
    if series.regularized {
        return Err(HyperError::InvalidSeries(
            "cannot reverse a regularized series".into(),
        ));
    }
    if series.arg.is_zero() {
        return Err(HyperError::InvalidSeries(
            "cannot reverse a series with zero argument".into(),
        ));
    }
    let prefactor = series.term(n)?;
    if n == 0 {
        return Ok((prefactor, series.clone()));
    }
    let nn = int(n as i64);
    let one = int(1);
    let shift = |x: &BigRational| &one - &nn - x;
    let mut upper = vec![-nn.clone()];
    upper.extend(series.lower.iter().map(shift));
    // the terminating parameter -N becomes the k! denominator
    let mut lower = Vec::with_capacity(series.upper.len());
    let mut dropped = false;
    for a in &series.upper {
        if !dropped && *a == -nn.clone() {
            dropped = true;
            continue;
        }
        lower.push(shift(a));
    }
    // (-1)^(q+1-p), written without the unsigned subtraction
    let sign_exp = series.lower.len() + 1 + series.upper.len();
    let sign = if sign_exp % 2 == 0 { int(1) } else { int(-1) };
    let arg = sign / &series.arg;
    Ok((prefactor, Pfq::new(upper, lower, arg)?))
}

/// Result of [`split_tail`]: `sum_{k=0}^{cut} t_k = full - tail_prefactor * tail`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitTail {
    pub full: Pfq,
    pub cut: u64,
    pub tail_prefactor: BigRational,
    pub tail: Pfq,
}

impl SplitTail {
    /// Checks the split exactly against partial sums truncated at `last >= cut + 1`.
    pub fn check_at(&self, last: u64) -> Result<bool> {
        assert!(last > self.cut);
        let head = direct_sum(&self.full, Some(self.cut))?;
        let full = direct_sum(&self.full, Some(last))?;
        let tail = direct_sum(&self.tail, Some(last - self.cut - 1))?;
        Ok(head == full - &self.tail_prefactor * tail)
    }
}

/// Whether the series converges at its argument.
pub fn converges(series: &Pfq) -> bool {
    if series.truncation().is_some() {
        return true;
    }
    let p = series.upper.len();
    let q = series.lower.len();
    if p <= q {
        return true;
    }
    if p > q + 1 {
        return false;
    }
    let abs = series.arg.abs();
    if abs < int(1) {
        return true;
    }
    if abs == int(1) {
        let s = series.balance();
        if series.arg.is_one() {
            return s.is_positive();
        }
        return s > int(-1);
    }
    false
}

/// Splits the finite head `sum_{k=0}^{cut}` off a convergent series.
pub fn split_tail(full: &Pfq, cut: u64) -> Result<SplitTail> {
    if full.regularized {
        return Err(HyperError::InvalidSeries(
            "cannot split a regularized series".into(),
        ));
    }
    if !converges(full) {
        return Err(HyperError::Divergent);
    }
    let shift = int(cut as i64 + 1);
    let tail_prefactor = full.term(cut + 1)?;
    let mut upper: Vec<BigRational> = full.upper.iter().map(|a| a + &shift).collect();
    upper.push(int(1));
    let mut lower: Vec<BigRational> = full.lower.iter().map(|b| b + &shift).collect();
    lower.push(int(cut as i64 + 2));
    let tail = Pfq::new(upper, lower, full.arg.clone())?;
    Ok(SplitTail {
        full: full.clone(),
        cut,
        tail_prefactor,
        tail,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    fn pfq(up: &[BigRational], lo: &[BigRational], z: BigRational) -> Pfq {
        Pfq::new(up.to_vec(), lo.to_vec(), z).unwrap()
    }

    fn s0_n1() -> Pfq {
        pfq(
            &[int(-1), rat(1, 2), rat(1, 2)],
            &[rat(3, 2), rat(-1, 2)],
            int(1),
        )
    }

    #[test]
    fn classify_examples() {
        let n = 4;
        let s = pfq(
            &[int(-n), rat(1, 2), rat(1, 2)],
            &[rat(3, 2), rat(1, 2) - int(n)],
            int(1),
        );
        let c = classify(&s);
        assert!(c.terminating && c.saalschutzian);
        assert_eq!(c.truncation, Some(4));
        assert_eq!(c.balance, int(1));

        let n = 3;
        let s3 = pfq(
            &[int(-n), int(1), int(1), int(1), rat(-1, 2) - int(n)],
            &[rat(3, 2), rat(1, 2) - int(n), int(2), rat(1, 2) - int(n)],
            int(1),
        );
        let c = classify(&s3);
        assert_eq!(c.balance, int(2));
        assert!(!c.saalschutzian);

        let c = classify(&pfq(&[int(1), int(1)], &[int(2)], int(1)));
        assert!(!c.terminating);
        assert_eq!(c.balance, int(0));
    }

    #[test]
    fn direct_sum_examples() {
        assert_eq!(direct_sum(&s0_n1(), None).unwrap(), rat(4, 3));
        assert_eq!(direct_sum(&s0_n1(), Some(0)).unwrap(), int(1));
        let g = pfq(&[int(1), int(1)], &[int(2)], int(1));
        assert_eq!(direct_sum(&g, Some(0)).unwrap(), int(1));
        assert_eq!(direct_sum(&g, None), Err(HyperError::NotTerminating));
        assert_eq!(
            direct_sum(&pfq(&[int(-2), int(-2)], &[int(1)], int(1)), None).unwrap(),
            int(6)
        );
    }

    #[test]
    fn term_matches_ratio_recurrence() {
        let s = s0_n1();
        let terms = s.terms_upto(1).unwrap();
        assert_eq!(terms[1], s.term(1).unwrap());
    }

    #[test]
    fn lower_pole_rules() {
        // lower -n with upper -n is admissible (terms stop at k = n)
        assert!(Pfq::new(vec![int(-3), int(1)], vec![int(-3)], int(1)).is_ok());
        assert!(Pfq::new(vec![int(-4), int(1)], vec![int(-3)], int(1)).is_err());
        assert!(Pfq::new(vec![int(1)], vec![int(0)], int(1)).is_err());
        assert!(Pfq::regularized(vec![int(1)], vec![int(0)], int(1)).is_ok());
        assert!(Pfq::regularized(vec![int(1)], vec![int(2)], int(1)).is_err());
    }

    #[test]
    fn regularized_sum_shifts_start() {
        // sum_k k x^k with x = 1/2 via 2F1~(1,1;0;x) truncated
        let s = Pfq::regularized(vec![int(1), int(1)], vec![int(0)], rat(1, 2)).unwrap();
        let t = s.terms_upto(3).unwrap();
        assert_eq!(t, vec![int(0), rat(1, 2), rat(2, 4), rat(3, 8)]);
        assert_eq!(direct_sum(&s, Some(3)).unwrap(), rat(11, 8));
    }

    #[test]
    fn reverse_examples() {
        let (pre, rev) = reverse(&s0_n1()).unwrap();
        assert_eq!(pre * direct_sum(&rev, None).unwrap(), rat(4, 3));

        let zero = pfq(&[int(0), int(3)], &[int(5)], int(1));
        let (pre, rev) = reverse(&zero).unwrap();
        assert_eq!(pre, int(1));
        assert_eq!(direct_sum(&rev, None).unwrap(), int(1));

        let g = pfq(&[int(1), int(1)], &[int(2)], int(1));
        assert_eq!(reverse(&g), Err(HyperError::NotTerminating));
    }

    #[test]
    fn reverse_s1_shape_matches_direct_sums() {
        // 4F3(-n,1,1,1; 2,3/2,1/2-n; 1) against its reversal
        for n in 0..8i64 {
            let s = pfq(
                &[int(-n), int(1), int(1), int(1)],
                &[int(2), rat(3, 2), rat(1, 2) - int(n)],
                int(1),
            );
            let (pre, rev) = reverse(&s).unwrap();
            assert_eq!(
                pre * direct_sum(&rev, None).unwrap(),
                direct_sum(&s, None).unwrap()
            );
            assert_eq!(classify(&rev).truncation, Some(n as u64));
        }
    }

    #[test]
    fn split_tail_examples() {
        // geometric series 1F0(1;;1/2) written with the k! convention as 2F1(1,1;1;1/2)
        let geo = pfq(&[int(1), int(1)], &[int(1)], rat(1, 2));
        let st = split_tail(&geo, 1).unwrap();
        assert_eq!(st.tail_prefactor, rat(1, 4));
        assert!(st.check_at(12).unwrap());

        // S8 at n = 0: 1F0(1;;1/2) cut at 0
        let s8 = pfq(&[int(1)], &[], rat(1, 2));
        let st = split_tail(&s8, 0).unwrap();
        assert_eq!(st.tail_prefactor, rat(1, 2));
        assert_eq!(st.tail, pfq(&[int(2), int(1)], &[int(2)], rat(1, 2)));
        assert!(st.check_at(9).unwrap());

        // S6 tail shape at n = 3, k = 1: 2F1(1,2;4;1) cut at n - k = 2
        let (n, k) = (3i64, 1i64);
        let full = pfq(&[int(k), int(k + 1)], &[int(2 * k + 2)], int(1));
        let st = split_tail(&full, (n - k) as u64).unwrap();
        assert_eq!(
            st.tail,
            pfq(
                &[int(n + 1), int(n + 2), int(1)],
                &[int(n + k + 3), int(n - k + 2)],
                int(1)
            )
        );
        assert!(st.check_at(20).unwrap());

        let div = pfq(&[int(1), int(1)], &[int(1)], int(1));
        assert_eq!(split_tail(&div, 2), Err(HyperError::Divergent));
    }

    #[test]
    fn pfq_text_round_trip() {
        let s: Pfq = "3F2(1/2,1,1;3/2,3/2;-1/4)".parse().unwrap();
        assert_eq!(s.upper(), &[rat(1, 2), int(1), int(1)]);
        assert_eq!(s.arg(), &rat(-1, 4));
        let again: Pfq = s.to_string().parse().unwrap();
        assert_eq!(again, s);
        let f: Pfq = "1F0(4;;1/2)".parse().unwrap();
        assert_eq!(f.q(), 0);
        assert!("2F1(1,2;3)".parse::<Pfq>().is_err());
        assert!("2F1(1;3;1)".parse::<Pfq>().is_err());
    }
}
