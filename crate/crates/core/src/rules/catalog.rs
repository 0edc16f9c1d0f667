//! Summation theorems and transformations, each taking a concrete series.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::value::{AtomTag, ClosedValue, Li2Arg, TransformExpr};
use super::{Result, RuleError};
use crate::exact::{
    gamma_ratio, int, is_integer, is_nonpositive_integer, pochhammer, pochhammer_signed, rat,
    to_i64, BigRational, ExactError, GammaValue,
};
use crate::hyper::{classify, Pfq};
use crate::special::{BigFloat, Precision};

fn not_applicable<T>(why: &str) -> Result<T> {
    Err(RuleError::NotApplicable(why.to_string()))
}

/// `v` with one occurrence of `x` removed.
fn without(v: &[BigRational], x: &BigRational) -> Option<Vec<BigRational>> {
    let i = v.iter().position(|y| y == x)?;
    let mut out = v.to_vec();
    out.remove(i);
    Some(out)
}

fn without_index(v: &[BigRational], i: usize) -> Vec<BigRational> {
    let mut out = v.to_vec();
    out.remove(i);
    out
}

fn same_multiset(a: &[BigRational], b: &[BigRational]) -> bool {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort();
    b.sort();
    a == b
}

/// Indices of nonpositive-integer upper parameters, shortest termination first.
fn terminating_indices(upper: &[BigRational]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..upper.len())
        .filter(|&i| is_nonpositive_integer(&upper[i]))
        .collect();
    idx.sort_by_key(|&i| -to_i64(&upper[i]).unwrap_or(i64::MIN));
    idx
}

fn neg_count(x: &BigRational) -> u64 {
    (-x).to_integer().to_u64().unwrap_or(u64::MAX)
}

fn nonzero(x: BigRational, what: &str) -> Result<BigRational> {
    if x.is_zero() {
        return Err(RuleError::Pole(what.to_string()));
    }
    Ok(x)
}

fn gamma(num: &[BigRational], den: &[BigRational]) -> Result<GammaValue> {
    gamma_ratio(num, den).map_err(|e| match e {
        ExactError::Pole(p) => RuleError::Pole(format!("gamma pole at {p}")),
        _ => RuleError::IrrationalResult,
    })
}

fn require_arg(series: &Pfq, z: &BigRational) -> Result<()> {
    if series.arg() != z || series.is_regularized() {
        return not_applicable(&format!("needs a plain series at argument {z}"));
    }
    Ok(())
}

/// Gamma-quotient closed forms are limits that need not hold when a lower
/// parameter sits on a pole of the term denominator.
fn require_regular_lower(series: &Pfq) -> Result<()> {
    match series.lower().iter().find(|b| is_nonpositive_integer(b)) {
        Some(b) => Err(RuleError::Pole(format!("lower parameter {b}"))),
        None => Ok(()),
    }
}

fn require_shape(series: &Pfq, p: usize, q: usize) -> Result<()> {
    if series.p() != p || series.q() != q {
        return not_applicable(&format!("needs a {p}F{q}"));
    }
    Ok(())
}

/// Saalschütz's theorem for a terminating one-balanced 3F2 at 1:
/// `(c-a)_n (c-b)_n / ((c)_n (c-a-b)_n)`.
pub fn sum_saalschutz(series: &Pfq) -> Result<BigRational> {
    require_shape(series, 3, 2)?;
    require_arg(series, &int(1))?;
    if !classify(series).saalschutzian {
        return not_applicable("series is not Saalschützian");
    }
    let up = series.upper();
    let lo = series.lower();
    for i in terminating_indices(up) {
        let n = neg_count(&up[i]);
        let rest = without_index(up, i);
        let (a, b) = (&rest[0], &rest[1]);
        for c in lo {
            let den = pochhammer(c, n) * pochhammer(&(c - a - b), n);
            if den.is_zero() {
                continue;
            }
            return Ok(pochhammer(&(c - a), n) * pochhammer(&(c - b), n) / den);
        }
    }
    Err(RuleError::Pole("vanishing Pochhammer denominator".into()))
}

/// Gauss's sum `2F1(a,b;c;1) = G(c)G(c-a-b)/(G(c-a)G(c-b))`; Chu–Vandermonde
/// `(c-b)_n/(c)_n` when `a = -n`.
pub fn sum_gauss_unit(series: &Pfq) -> Result<GammaValue> {
    require_shape(series, 2, 1)?;
    require_arg(series, &int(1))?;
    let up = series.upper();
    let c = &series.lower()[0];
    if let Some(&i) = terminating_indices(up).first() {
        let n = neg_count(&up[i]);
        let b = &up[1 - i];
        let den = nonzero(pochhammer(c, n), "(c)_n")?;
        return Ok(GammaValue::rational(pochhammer(&(c - b), n) / den));
    }
    let (a, b) = (&up[0], &up[1]);
    if !(c - a - b).is_positive() {
        return Err(RuleError::Divergent);
    }
    gamma(&[c.clone(), c - a - b], &[c - a, c - b])
}

/// `2F1(a,b;(a+b+1)/2;1/2) = sqrt(pi) G((a+b+1)/2) / (G((a+1)/2) G((b+1)/2))`.
pub fn sum_gauss_second_half(series: &Pfq) -> Result<GammaValue> {
    require_shape(series, 2, 1)?;
    require_arg(series, &rat(1, 2))?;
    require_regular_lower(series)?;
    let (a, b) = (&series.upper()[0], &series.upper()[1]);
    let c = &series.lower()[0];
    let half = rat(1, 2);
    if *c != (a + b + int(1)) * &half {
        return not_applicable("lower parameter is not (a+b+1)/2");
    }
    gamma(
        &[half.clone(), c.clone()],
        &[(a + int(1)) * &half, (b + int(1)) * &half],
    )
}

/// Exact real `q`-th root of a rational, if it exists.
fn exact_root(x: &BigRational, q: u32) -> Option<BigRational> {
    if x.is_negative() {
        return if q % 2 == 1 {
            exact_root(&-x, q).map(|r| -r)
        } else {
            None
        };
    }
    let n = x.numer().nth_root(q);
    let d = x.denom().nth_root(q);
    (num_traits::pow::pow(n.clone(), q as usize) == *x.numer()
        && num_traits::pow::pow(d.clone(), q as usize) == *x.denom())
    .then(|| BigRational::new(n, d))
}

fn pow_signed(x: &BigRational, e: &BigInt) -> BigRational {
    let m = e.abs().to_usize().expect("exponent fits");
    let p = num_traits::pow::pow(x.clone(), m);
    if e.is_negative() {
        p.recip()
    } else {
        p
    }
}

/// The binomial theorem `1F0(a;;z) = (1-z)^(-a)`.
pub fn sum_binomial_1f0(series: &Pfq) -> Result<BigRational> {
    require_shape(series, 1, 0)?;
    if series.is_regularized() {
        return not_applicable("regularized series");
    }
    let a = &series.upper()[0];
    let z = series.arg();
    if z.is_zero() {
        return Ok(int(1));
    }
    if !is_nonpositive_integer(a) && z.abs() >= int(1) {
        return Err(RuleError::Divergent);
    }
    let base = int(1) - z;
    let q = a.denom().to_u32().ok_or(RuleError::IrrationalResult)?;
    let root = exact_root(&base, q).ok_or(RuleError::IrrationalResult)?;
    Ok(pow_signed(&root, &-a.numer().clone()))
}

/// Matches `4F3(1,a,b,c; 3-a,3-b,3-c; 1)`, also in the collapsed form where
/// `c = 2` cancels the unit parameters.
fn match_reciprocal_shift(series: &Pfq) -> Option<[BigRational; 3]> {
    if series.arg() != &int(1) || series.is_regularized() {
        return None;
    }
    let try_match = |up: &[BigRational], lo: &[BigRational]| -> Option<[BigRational; 3]> {
        if up.len() != 4 || lo.len() != 3 {
            return None;
        }
        for i in 0..4 {
            if !up[i].is_one() {
                continue;
            }
            let rest = without_index(up, i);
            let mirrored: Vec<BigRational> = rest.iter().map(|x| int(3) - x).collect();
            if same_multiset(&mirrored, lo) {
                return Some([rest[0].clone(), rest[1].clone(), rest[2].clone()]);
            }
        }
        None
    };
    let up = series.upper();
    let lo = series.lower();
    try_match(up, lo).or_else(|| {
        let mut u = up.to_vec();
        u.push(int(1));
        let mut l = lo.to_vec();
        l.push(int(1));
        try_match(&u, &l)
    })
}

/// `4F3(1,a,b,c; 3-a,3-b,3-c; 1)` as a two-term gamma expression.
pub fn sum_reciprocal_shift(series: &Pfq) -> Result<BigRational> {
    let [a, b, c] = match_reciprocal_shift(series)
        .ok_or_else(|| RuleError::NotApplicable("needs 4F3(1,a,b,c;3-a,3-b,3-c;1)".into()))?;
    let three = int(3);
    let g = gamma(
        &[&three - &a, &three - &b, &three - &c, int(4) - &a - &b - &c],
        &[&three - &a - &b, &three - &a - &c, &three - &b - &c],
    )?;
    let g = g.to_rational().ok_or(RuleError::IrrationalResult)?;
    let one = int(1);
    let two = int(2);
    let d = nonzero(
        &two * (&a - &one) * (&b - &one) * (&c - &one),
        "2(a-1)(b-1)(c-1)",
    )?;
    Ok((g - (&two - &a) * (&two - &b) * (&two - &c)) / d)
}

/// Matches `3F2(a,b,1; -m-a,-m-b; 1)` with integer `m >= -1`.
fn match_reflected(series: &Pfq) -> Option<(BigRational, BigRational, i64)> {
    if series.p() != 3 || series.q() != 2 || series.arg() != &int(1) || series.is_regularized() {
        return None;
    }
    let rest = without(series.upper(), &int(1))?;
    let lo = series.lower();
    for (a, b) in [(&rest[0], &rest[1]), (&rest[1], &rest[0])] {
        let m1 = -(&lo[0] + a);
        let m2 = -(&lo[1] + b);
        if m1 == m2 && is_integer(&m1) {
            let m = to_i64(&m1)?;
            if m >= -1 {
                return Some((a.clone(), b.clone(), m));
            }
        }
    }
    None
}

/// `3F2(a,b,1; -m-a,-m-b; 1)`: half of a finite sum plus a gamma product.
pub fn sum_reflected_unit(series: &Pfq) -> Result<ClosedValue> {
    let (a, b, m) = match_reflected(series)
        .ok_or_else(|| RuleError::NotApplicable("needs 3F2(a,b,1;-m-a,-m-b;1)".into()))?;
    let mm = int(m);
    let half = rat(1, 2);
    let mut head = BigRational::zero();
    for k in 0..=(m + 1) as u64 {
        let den = pochhammer(&(-&a - &mm), k) * pochhammer(&(-&b - &mm), k);
        let den = nonzero(den, "finite part")?;
        head += pochhammer(&a, k) * pochhammer(&b, k) / den;
    }
    let one = int(1);
    let p1 = pochhammer_signed(&(&one + &mm + &a * int(2)), m)?;
    let p2 = pochhammer_signed(&(&one + &mm + &b * int(2)), m)?;
    let den = nonzero(p1 * p2, "Pochhammer product")?;
    let two_pow = if 2 * m - 1 >= 0 {
        int(1 << (2 * m - 1))
    } else {
        rat(1, 1 << (1 - 2 * m))
    };
    let g = gamma(
        &[half.clone(), &one - &a, &one - &b, -&a - &b - &mm - &half],
        &[-&a - &b - &mm, &half - &a - &mm, &half - &b - &mm],
    )?;
    let tail = ClosedValue::from_gamma(&g.scale(&(two_pow / den)));
    Ok(ClosedValue::rational(head * half).add(&tail))
}

/// Whipple's transformation of a terminating Saalschützian 4F3:
/// `4F3(-n,a1,a2,a3; b1,b2,1-s-n; 1)` with `s = b1+b2-a1-a2-a3` equals
/// `(a1+s)_n (a2+s)_n (a3)_n / ((b1)_n (b2)_n (s)_n)` times
/// `4F3(b1-a3, b2-a3, s, -n; a1+s, a2+s, 1-a3-n; 1)`.
pub fn transform_whipple(series: &Pfq) -> Result<TransformExpr> {
    require_shape(series, 4, 3)?;
    require_arg(series, &int(1))?;
    let up = series.upper();
    let lo = series.lower();
    let mut last_err =
        RuleError::NotApplicable("no parameter pairing has the Whipple shape".into());
    for i in terminating_indices(up) {
        let minus_n = up[i].clone();
        let n = neg_count(&minus_n);
        let rest = without_index(up, i);
        for a3_idx in (0..3).rev() {
            let a3 = rest[a3_idx].clone();
            let others = without_index(&rest, a3_idx);
            let (a1, a2) = (&others[0], &others[1]);
            for j in (0..3).rev() {
                let bs = without_index(lo, j);
                let (b1, b2) = (&bs[0], &bs[1]);
                let s = b1 + b2 - a1 - a2 - &a3;
                if lo[j] != int(1) - &s - &minus_n.abs() {
                    continue;
                }
                let den = pochhammer(b1, n) * pochhammer(b2, n) * pochhammer(&s, n);
                if den.is_zero() {
                    last_err = RuleError::Pole("(b1)_n (b2)_n (s)_n".into());
                    continue;
                }
                let num =
                    pochhammer(&(a1 + &s), n) * pochhammer(&(a2 + &s), n) * pochhammer(&a3, n);
                let target = Pfq::new(
                    vec![b1 - &a3, b2 - &a3, s.clone(), minus_n.clone()],
                    vec![a1 + &s, a2 + &s, int(1) - &a3 - int(n as i64)],
                    int(1),
                );
                match target {
                    Ok(t) => return Ok(TransformExpr::single(ClosedValue::rational(num / den), t)),
                    Err(e) => last_err = e.into(),
                }
            }
        }
    }
    Err(last_err)
}

/// Upper parameters `x` whose `x + 1` is a lower parameter, largest first.
fn paired_candidates(series: &Pfq) -> Vec<BigRational> {
    let mut c: Vec<BigRational> = series
        .upper()
        .iter()
        .filter(|x| series.lower().contains(&(*x + int(1))))
        .cloned()
        .collect();
    c.sort_by(|a, b| b.cmp(a));
    c.dedup();
    c
}

/// Partial fractions in `k` for a series carrying `rho, sigma` upstairs and
/// `rho+1, sigma+1` downstairs:
/// `F(A,rho,sigma; B,rho+1,sigma+1) = sigma/(sigma-rho) F(A,rho; B,rho+1)
///  - rho/(sigma-rho) F(A,sigma; B,sigma+1)`.
pub fn split_paired_parameters(series: &Pfq) -> Result<TransformExpr> {
    if series.is_regularized() {
        return not_applicable("regularized series");
    }
    let cands = paired_candidates(series);
    if cands.len() < 2 {
        return not_applicable("needs two distinct parameters x with x+1 downstairs");
    }
    let (rho, sigma) = (&cands[0], &cands[1]);
    let drop = |x: &BigRational| -> Result<Pfq> {
        let up = without(series.upper(), x).expect("candidate upstairs");
        let lo = without(series.lower(), &(x + int(1))).expect("candidate downstairs");
        Ok(Pfq::new(up, lo, series.arg().clone())?)
    };
    let diff = sigma - rho;
    let keep_rho = drop(sigma)?;
    let keep_sigma = drop(rho)?;
    Ok(TransformExpr {
        nodes: vec![
            (ClosedValue::rational(sigma / &diff), keep_rho),
            (ClosedValue::rational(-(rho / &diff)), keep_sigma),
        ],
        addend: None,
    })
}

/// Removes equal upper/lower pairs that cannot affect termination.
fn cancel_common(
    upper: Vec<BigRational>,
    mut lower: Vec<BigRational>,
) -> (Vec<BigRational>, Vec<BigRational>) {
    let mut up = Vec::with_capacity(upper.len());
    for a in upper {
        match lower
            .iter()
            .position(|b| *b == a && !is_nonpositive_integer(b))
        {
            Some(i) => {
                lower.remove(i);
            }
            None => up.push(a),
        }
    }
    (up, lower)
}

/// Shift of a regularized series past its vanishing terms:
/// `F~ = z^(M+1) prod (a)_(M+1) / ((M+1)! prod (b)_(M+1))` times the plain
/// series with every parameter raised by `M+1` and `M+2` added downstairs.
pub fn shift_negative_lower(series: &Pfq) -> Result<(ClosedValue, Pfq)> {
    let m = series
        .regularized_m()
        .ok_or_else(|| RuleError::NotApplicable("needs a regularized series".into()))?;
    let shift = int(m as i64 + 1);
    let reg_idx = series
        .lower()
        .iter()
        .position(is_nonpositive_integer)
        .expect("regularized");
    let others = without_index(series.lower(), reg_idx);
    let mut num = num_traits::pow::pow(series.arg().clone(), m as usize + 1);
    for a in series.upper() {
        num *= pochhammer(a, m + 1);
    }
    let mut den = BigRational::from_integer(crate::exact::factorial(m + 1));
    for b in &others {
        den *= pochhammer(b, m + 1);
    }
    let den = nonzero(den, "(b)_(M+1)")?;
    let upper: Vec<BigRational> = series.upper().iter().map(|a| a + &shift).collect();
    let mut lower: Vec<BigRational> = others.iter().map(|b| b + &shift).collect();
    lower.push(int(m as i64 + 2));
    let (upper, lower) = cancel_common(upper, lower);
    let shifted = Pfq::new(upper, lower, series.arg().clone())?;
    Ok((ClosedValue::rational(num / den), shifted))
}

/// `pFq(a,1; b,2; 1) = prod(b-1)/prod(a-1) [F(a-1; b-1; 1) - 1]`.
pub fn reduce_unit_parameter(series: &Pfq) -> Result<TransformExpr> {
    require_arg(series, &int(1))?;
    let up = without(series.upper(), &int(1))
        .ok_or_else(|| RuleError::NotApplicable("needs an upper 1".into()))?;
    let lo = without(series.lower(), &int(2))
        .ok_or_else(|| RuleError::NotApplicable("needs a lower 2".into()))?;
    if up.iter().any(One::is_one) {
        return Err(RuleError::Pole("a second upper parameter equals 1".into()));
    }
    let one = int(1);
    let mut pref = BigRational::one();
    for b in &lo {
        pref *= b - &one;
    }
    for a in &up {
        pref /= a - &one;
    }
    let reduced = Pfq::new(
        up.iter().map(|a| a - &one).collect(),
        lo.iter().map(|b| b - &one).collect(),
        int(1),
    )?;
    Ok(
        TransformExpr::single(ClosedValue::rational(pref.clone()), reduced)
            .with_addend(ClosedValue::rational(-pref)),
    )
}

/// Contiguous relation `sigma F(sigma+1) - rho F(rho+1) = (sigma - rho) F`
/// applied to a source carrying `rho` and `sigma + 1` upstairs:
/// `F(rho, sigma+1) = (rho/sigma) F(rho+1, sigma) + ((sigma-rho)/sigma) F(rho, sigma)`.
pub fn contiguous_upper(
    series: &Pfq,
    sigma: &BigRational,
    rho: &BigRational,
) -> Result<TransformExpr> {
    if series.is_regularized() {
        return not_applicable("regularized series");
    }
    if sigma.is_zero() {
        return Err(RuleError::Pole("sigma = 0".into()));
    }
    let one = int(1);
    let sp1 = sigma + &one;
    let rest = without(series.upper(), rho)
        .and_then(|r| without(&r, &sp1))
        .ok_or_else(|| {
            RuleError::NotApplicable(format!("needs upper parameters {rho} and {sp1}"))
        })?;
    let build = |x: BigRational, y: BigRational| -> Result<Pfq> {
        let mut up = vec![x, y];
        up.extend(rest.iter().cloned());
        Ok(Pfq::new(up, series.lower().to_vec(), series.arg().clone())?)
    };
    let raised = build(rho + &one, sigma.clone())?;
    let base = build(rho.clone(), sigma.clone())?;
    Ok(TransformExpr {
        nodes: vec![
            (ClosedValue::rational(rho / sigma), raised),
            (ClosedValue::rational((sigma - rho) / sigma), base),
        ],
        addend: None,
    })
}

/// Coefficients of `c+ F(a1+1) + c0 F(a1) + c- F(a1-1) = 0` for a 3F2 at 1,
/// with `a1` the first upper parameter.
pub fn three_term_upper(series: &Pfq) -> Result<(BigRational, BigRational, BigRational)> {
    require_shape(series, 3, 2)?;
    require_arg(series, &int(1))?;
    let (a1, a2, a3) = (&series.upper()[0], &series.upper()[1], &series.upper()[2]);
    let (b1, b2) = (&series.lower()[0], &series.lower()[1]);
    let one = int(1);
    let cplus = a1 * (b1 + b2 - a1 - a2 - a3 - &one);
    let c0 = (a1 * int(2) - b1) * (a1 * int(2) - b2) + a1 - a1 * a1 - (a1 - a2) * (a1 - a3);
    let cminus = -((a1 - b1) * (a1 - b2));
    Ok((cplus, c0, cminus))
}

fn with_first_upper(series: &Pfq, a1: BigRational) -> Result<Pfq> {
    let mut up = series.upper().to_vec();
    up[0] = a1;
    Ok(Pfq::new(up, series.lower().to_vec(), series.arg().clone())?)
}

/// The three-term relation solved for `F(a1)`.
pub fn three_term_transform(series: &Pfq) -> Result<TransformExpr> {
    let (cp, c0, cm) = three_term_upper(series)?;
    let c0 = nonzero(c0, "middle coefficient")?;
    let a1 = &series.upper()[0];
    let up = with_first_upper(series, a1 + int(1))?;
    let down = with_first_upper(series, a1 - int(1))?;
    Ok(TransformExpr {
        nodes: vec![
            (ClosedValue::rational(-(cp / &c0)), up),
            (ClosedValue::rational(-(cm / &c0)), down),
        ],
        addend: None,
    })
}

/// Thomae's relation with `a` the last upper and `d` the last lower
/// parameter: `3F2(b,c,a; e,d; 1) = G(e)G(s) / (G(e-a)G(d+e-b-c))
/// 3F2(a, d-b, d-c; d, d+e-b-c; 1)` where `s = d+e-a-b-c`.
pub fn transform_thomae(series: &Pfq) -> Result<(GammaValue, Pfq)> {
    require_shape(series, 3, 2)?;
    require_arg(series, &int(1))?;
    require_regular_lower(series)?;
    let (b, c, a) = (&series.upper()[0], &series.upper()[1], &series.upper()[2]);
    let (e, d) = (&series.lower()[0], &series.lower()[1]);
    let s = d + e - a - b - c;
    if series.truncation().is_none() && !s.is_positive() {
        return Err(RuleError::Divergent);
    }
    let pref = gamma(&[e.clone(), s.clone()], &[e - a, d + e - b - c])?;
    let target = Pfq::new(
        vec![a.clone(), d - b, d - c],
        vec![d.clone(), d + e - b - c],
        int(1),
    )?;
    Ok((pref, target))
}

fn is_log_shape(series: &Pfq) -> bool {
    !series.is_regularized()
        && same_multiset(series.upper(), &[int(1), int(1), rat(3, 2)])
        && same_multiset(series.lower(), &[int(2), int(2)])
}

fn is_dilog_shape(series: &Pfq) -> bool {
    !series.is_regularized()
        && same_multiset(series.upper(), &[rat(1, 2), int(1), int(1)])
        && same_multiset(series.lower(), &[rat(3, 2), rat(3, 2)])
}

/// `3F2(1,1,3/2; 2,2; z) = (4/z) ln(2(1 - sqrt(1-z))/z)`.
pub fn eval_log_3f2(z: &BigRational, prec: Precision) -> Result<BigFloat> {
    AtomTag::LnAlg365(z.clone()).value(prec)
}

/// `3F2(1/2,1,1; 3/2,3/2; -z) = ((1-x^2)/(2x)) [Li2(x) - Li2(-x)]` where
/// `z(1-x^2)^2 = 4x^2`, `0 < x < 1`.
pub fn eval_dilog_3f2(z: &BigRational, prec: Precision) -> Result<BigFloat> {
    AtomTag::Eval413(z.clone()).value(prec)
}

/// Closed value of the logarithmic 3F2 at its argument.
pub fn closed_log_3f2(series: &Pfq) -> Result<ClosedValue> {
    if !is_log_shape(series) {
        return not_applicable("needs 3F2(1,1,3/2;2,2;z)");
    }
    let z = series.arg();
    if z.is_zero() {
        return Ok(ClosedValue::rational(int(1)));
    }
    if *z > int(1) {
        return Err(RuleError::Domain(format!("z = {z} > 1")));
    }
    if *z == int(-1) {
        return Ok(ClosedValue::atom(AtomTag::LnS5, int(-4)));
    }
    Ok(ClosedValue::atom(AtomTag::LnAlg365(z.clone()), int(1)))
}

/// Closed value of the dilogarithmic 3F2 at its argument `-z`.
pub fn closed_dilog_3f2(series: &Pfq) -> Result<ClosedValue> {
    if !is_dilog_shape(series) {
        return not_applicable("needs 3F2(1/2,1,1;3/2,3/2;-z)");
    }
    let z = -series.arg();
    if z.is_zero() {
        return Ok(ClosedValue::rational(int(1)));
    }
    if z.is_negative() || z > int(1) {
        return Err(RuleError::Domain(format!("z = {z} outside (0, 1]")));
    }
    if z == rat(1, 4) {
        // x = sqrt5 - 2 and (1-x^2)/(2x) = 2
        return Ok(
            ClosedValue::atom(AtomTag::Li2(Li2Arg::SqrtFiveMinusTwo), int(2)).add(
                &ClosedValue::atom(AtomTag::Li2(Li2Arg::TwoMinusSqrtFive), int(-2)),
            ),
        );
    }
    Ok(ClosedValue::atom(AtomTag::Eval413(z), int(1)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyper::direct_sum;

    fn pfq(s: &str) -> Pfq {
        s.parse().unwrap()
    }

    #[test]
    fn saalschutz_examples() {
        assert_eq!(
            sum_saalschutz(&pfq("3F2(0,1/3,2/5;7/4,-1/60;1)")).unwrap(),
            int(1)
        );
        assert_eq!(
            sum_saalschutz(&pfq("3F2(-1,1/2,1/2;3/2,-1/2;1)")).unwrap(),
            rat(4, 3)
        );
        assert!(matches!(
            sum_saalschutz(&pfq("3F2(-1,1/2,1/2;3/2,1/2;1)")),
            Err(RuleError::NotApplicable(_))
        ));
    }

    #[test]
    fn gauss_examples() {
        let b = rat(2, 7);
        let c = rat(9, 5);
        let s = Pfq::new(vec![int(-1), b.clone()], vec![c.clone()], int(1)).unwrap();
        assert_eq!(
            sum_gauss_unit(&s).unwrap().to_rational(),
            Some((&c - &b) / &c)
        );
        assert_eq!(
            sum_gauss_unit(&pfq("2F1(-1,-2;1;1)"))
                .unwrap()
                .to_rational(),
            Some(int(3))
        );
        assert_eq!(
            sum_gauss_unit(&pfq("2F1(-2,-2;1;1)"))
                .unwrap()
                .to_rational(),
            Some(int(6))
        );
        assert_eq!(
            sum_gauss_unit(&pfq("2F1(1/2,1/2;2;1)")).unwrap(),
            GammaValue::new(rat(4, 1), -2)
        );
        assert!(matches!(
            sum_gauss_unit(&pfq("2F1(1,1;2;1)")),
            Err(RuleError::Divergent)
        ));
    }

    #[test]
    fn second_half_examples() {
        assert_eq!(
            sum_gauss_second_half(&pfq("2F1(0,3/5;4/5;1/2)"))
                .unwrap()
                .to_rational(),
            Some(int(1))
        );
        assert_eq!(
            sum_gauss_second_half(&pfq("2F1(2,1;2;1/2)"))
                .unwrap()
                .to_rational(),
            Some(int(2))
        );
        assert_eq!(
            sum_gauss_second_half(&pfq("2F1(1,1;3/2;1/2)")).unwrap(),
            GammaValue::new(rat(1, 2), 2)
        );
    }

    #[test]
    fn binomial_examples() {
        assert_eq!(sum_binomial_1f0(&pfq("1F0(7/3;;0)")).unwrap(), int(1));
        assert_eq!(sum_binomial_1f0(&pfq("1F0(-2;;1/3)")).unwrap(), rat(4, 9));
        assert_eq!(sum_binomial_1f0(&pfq("1F0(4;;1/2)")).unwrap(), int(16));
        assert_eq!(sum_binomial_1f0(&pfq("1F0(1/2;;3/4)")).unwrap(), int(2));
        assert!(matches!(
            sum_binomial_1f0(&pfq("1F0(1/2;;1/2)")),
            Err(RuleError::IrrationalResult)
        ));
        assert!(matches!(
            sum_binomial_1f0(&pfq("1F0(1;;2)")),
            Err(RuleError::Divergent)
        ));
    }

    #[test]
    fn reciprocal_shift_specialization() {
        assert_eq!(
            sum_reciprocal_shift(&pfq("3F2(0,0,2;3,3;1)")).unwrap(),
            int(1)
        );
        assert_eq!(
            sum_reciprocal_shift(&pfq("3F2(-1,-1,2;4,4;1)")).unwrap(),
            rat(9, 8)
        );
        for n in 1..12i64 {
            let s = Pfq::new(
                vec![int(1 - n), int(1 - n), int(2)],
                vec![int(n + 2), int(n + 2)],
                int(1),
            )
            .unwrap();
            let v = sum_reciprocal_shift(&s).unwrap();
            assert_eq!(v, rat((n + 1) * (n + 1), 4 * n));
            assert_eq!(v, direct_sum(&s, None).unwrap());
        }
    }

    #[test]
    fn reflected_unit_specialization() {
        for n in 0..10i64 {
            let s = Pfq::new(
                vec![int(-n), int(-n), int(1)],
                vec![int(n + 1), int(n + 1)],
                int(1),
            )
            .unwrap();
            let v = sum_reflected_unit(&s).unwrap().as_rational().unwrap();
            let c = |a: i64, b: i64| crate::exact::binomial(a, b);
            let expect = rat(1, 2) + rat(1, 2) * c(4 * n, 2 * n) / (c(2 * n, n) * c(2 * n, n));
            assert_eq!(v, expect, "n = {n}");
            assert_eq!(v, direct_sum(&s, None).unwrap());
        }
    }

    #[test]
    fn whipple_instance() {
        for n in 0..8i64 {
            let s = Pfq::new(
                vec![int(-n), int(1), int(1), int(1)],
                vec![int(2), rat(3, 2), rat(1, 2) - int(n)],
                int(1),
            )
            .unwrap();
            let t = transform_whipple(&s).unwrap();
            let (scale, target) = &t.nodes[0];
            assert_eq!(scale.as_rational(), Some(rat(2 * n + 1, n + 1)));
            let mut up = target.upper().to_vec();
            up.sort();
            assert_eq!(up, vec![int(-n), rat(1, 2), rat(1, 2), int(1)]);
            assert_eq!(
                t.evaluate_exact().unwrap().as_rational(),
                Some(direct_sum(&s, None).unwrap())
            );
        }
    }

    #[test]
    fn split_instance() {
        let s = pfq("5F4(-1,1,1,1,-3/2;3/2,-1/2,2,-1/2;1)");
        assert_eq!(direct_sum(&s, None).unwrap(), int(3));
        let t = split_paired_parameters(&s).unwrap();
        assert_eq!(t.nodes[0].0.as_rational(), Some(rat(3, 5)));
        assert_eq!(t.nodes[1].0.as_rational(), Some(rat(2, 5)));
        assert_eq!(direct_sum(&t.nodes[0].1, None).unwrap(), rat(5, 3));
        assert_eq!(direct_sum(&t.nodes[1].1, None).unwrap(), int(5));
        assert_eq!(t.evaluate_exact().unwrap().as_rational(), Some(int(3)));
    }

    #[test]
    fn shift_example() {
        let s = Pfq::regularized(vec![int(1), int(1)], vec![int(0)], rat(1, 2)).unwrap();
        let (pref, shifted) = shift_negative_lower(&s).unwrap();
        assert_eq!(pref.as_rational(), Some(rat(1, 2)));
        assert_eq!(shifted.upper(), &[int(2)]);
        let v = crate::special::eval_pfq_numeric(&shifted, Precision::digits(30), 1000).unwrap();
        assert!(v.within(&BigFloat::from_int(4, Precision::digits(30)), 30));
    }

    #[test]
    fn reduce_examples() {
        let a = rat(5, 7);
        let b = rat(9, 4);
        let s = Pfq::new(vec![int(0), a, int(1)], vec![b, int(2)], int(1)).unwrap();
        assert_eq!(
            reduce_unit_parameter(&s)
                .unwrap()
                .evaluate_exact()
                .unwrap()
                .as_rational(),
            Some(int(1))
        );
        let s = pfq("3F2(0,-1,1;3,2;1)");
        let t = reduce_unit_parameter(&s).unwrap();
        assert_eq!(t.nodes[0].0.as_rational(), Some(int(1)));
        assert_eq!(direct_sum(&t.nodes[0].1, None).unwrap(), int(2));
        assert_eq!(t.evaluate_exact().unwrap().as_rational(), Some(int(1)));
    }

    #[test]
    fn contiguous_instance() {
        let s = pfq("4F3(2,2,0,0;1,3,3;1)");
        let t = contiguous_upper(&s, &int(1), &int(2)).unwrap();
        assert_eq!(t.nodes[0].0.as_rational(), Some(int(2)));
        assert_eq!(t.nodes[1].0.as_rational(), Some(int(-1)));
        assert_eq!(t.evaluate_exact().unwrap().as_rational(), Some(int(1)));
    }

    #[test]
    fn three_term_instances() {
        let (cp, c0, cm) = three_term_upper(&pfq("3F2(2,0,0;3,3;1)")).unwrap();
        assert_eq!((cp, c0, cm), (int(6), int(-5), int(-1)));
        for n in 2..=10i64 {
            let f = |a1: i64| {
                let s = Pfq::new(
                    vec![int(a1), int(1 - n), int(1 - n)],
                    vec![int(n + 2), int(n + 2)],
                    int(1),
                )
                .unwrap();
                direct_sum(&s, None).unwrap()
            };
            let s = Pfq::new(
                vec![int(2), int(1 - n), int(1 - n)],
                vec![int(n + 2), int(n + 2)],
                int(1),
            )
            .unwrap();
            let (cp, c0, cm) = three_term_upper(&s).unwrap();
            assert_eq!(cp, int(2 * (4 * n - 1)));
            assert_eq!(c0, int(1 - 6 * n));
            assert_eq!(cm, int(-n * n));
            assert!((cp * f(3) + c0 * f(2) + cm * f(1)).is_zero());
        }
    }

    #[test]
    fn thomae_instance() {
        // tail of the Lah sum at n=3, k=1
        let (n, k) = (3i64, 1i64);
        let s = Pfq::new(
            vec![int(n + 1), int(n + 2), int(1)],
            vec![int(n + k + 3), int(n - k + 2)],
            int(1),
        )
        .unwrap();
        let (pref, target) = transform_thomae(&s).unwrap();
        assert_eq!(pref.to_rational(), Some(int(n + k + 2)));
        assert_eq!(target.upper(), &[int(1), int(1 - k), int(-k)]);
        assert_eq!(target.lower(), &[int(n - k + 2), int(2)]);
        let p = Precision::digits(30);
        let lhs = crate::special::eval_pfq_numeric(&s, p, 100_000).unwrap();
        let rhs =
            BigFloat::from_rational(&(int(n + k + 2) * direct_sum(&target, None).unwrap()), p);
        assert!(lhs.within(&rhs, 28), "{lhs} vs {rhs}");
    }

    #[test]
    fn closed_forms() {
        let p = Precision::digits(40);
        let v = closed_log_3f2(&pfq("3F2(1,1,3/2;2,2;-1)")).unwrap();
        let expect =
            crate::special::eval_pfq_numeric(&pfq("3F2(1,1,3/2;2,2;-1)"), p, 1000).unwrap();
        assert!(v.to_bigfloat(p).unwrap().within(&expect, 35));
        let four_ln2 = crate::special::ln2(p).mul_int(4);
        assert!(eval_log_3f2(&int(1), p).unwrap().within(&four_ln2, 35));
        let small = eval_log_3f2(&rat(1, 100_000_000), p).unwrap();
        assert!(small.within(&BigFloat::one(p), 7));
        let v = closed_dilog_3f2(&pfq("3F2(1/2,1,1;3/2,3/2;-1/4)")).unwrap();
        let expect =
            crate::special::eval_pfq_numeric(&pfq("3F2(1/2,1,1;3/2,3/2;-1/4)"), p, 1000).unwrap();
        assert!(v.to_bigfloat(p).unwrap().within(&expect, 35));
        assert!(eval_dilog_3f2(&rat(1, 100_000_000), p)
            .unwrap()
            .within(&BigFloat::one(p), 7));
    }
}
