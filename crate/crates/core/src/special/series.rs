//! Numerical summation of alternating and hypergeometric series.

use num_traits::{One, Signed, Zero};

use super::float::{BigFloat, Precision};
use super::{Result, SpecialError};
use crate::exact::{int, BigRational};
use crate::hyper::{direct_sum, Pfq};

/// Accelerated sum of an alternating series, with the raw partial sums
/// `(S_N, S_{N+1})` that bracket it when requested.
#[derive(Debug, Clone)]
pub struct Accelerated {
    pub value: BigFloat,
    pub bracket: Option<(BigFloat, BigFloat)>,
}

/// Number of terms the acceleration needs for `digits` correct digits.
fn cvz_terms(prec: Precision) -> u64 {
    let d = f64::from(prec.decimal_digits() + 5);
    (d * std::f64::consts::LN_10 / (3.0 + 8f64.sqrt()).ln()).ceil() as u64 + 2
}

/// Cohen–Rodriguez Villegas–Zagier acceleration of `sum_k terms(k)` where the
/// terms alternate in sign with decreasing magnitudes.
///
/// `bracket_at = Some(N)` also returns the raw partial sums `S_N` and `S_{N+1}`.
pub fn accelerate_alternating<F>(
    mut terms: F,
    prec: Precision,
    bracket_at: Option<u64>,
) -> Result<Accelerated>
where
    F: FnMut(u64) -> BigRational,
{
    let work = prec.raised(10);
    let n = cvz_terms(prec);
    let inspect = n.max(bracket_at.map_or(0, |b| b + 2));
    let mut values = Vec::with_capacity(inspect as usize);
    for k in 0..inspect {
        values.push(terms(k));
    }
    let sign0 = values[0].signum();
    if sign0.is_zero() {
        return Err(SpecialError::NotAlternating(0));
    }
    for (k, v) in values.iter().enumerate() {
        let expect = if k % 2 == 0 {
            sign0.clone()
        } else {
            -sign0.clone()
        };
        if v.signum() != expect {
            return Err(SpecialError::NotAlternating(k as u64));
        }
    }
    // d = ((3+sqrt 8)^n + (3+sqrt 8)^-n) / 2
    let base = BigFloat::from_int(3, work) + BigFloat::from_int(8, work).sqrt();
    let mut d = BigFloat::one(work);
    for _ in 0..n {
        d = &d * &base;
    }
    d = (&d + &(BigFloat::one(work) / &d)).div_int(2);
    let nn = n as i64;
    let mut b = -BigRational::one();
    let mut c = -d.clone();
    let mut s = BigFloat::zero(work);
    for k in 0..nn {
        c = BigFloat::from_rational(&b, work) - &c;
        let ak = BigFloat::from_rational(&values[k as usize].abs(), work);
        s = &s + &(&c * &ak);
        b = b * int((k + nn) * (k - nn)) * int(2) / (int(2 * k + 1) * int(k + 1));
    }
    let mut value = (s / d).with_precision(prec);
    if sign0.is_negative() {
        value = -value;
    }
    let bracket = bracket_at.map(|at| {
        let mut partial = BigFloat::zero(prec);
        for v in &values[..=at as usize] {
            partial = &partial + &BigFloat::from_rational(v, prec);
        }
        let next = &partial + &BigFloat::from_rational(&values[at as usize + 1], prec);
        (partial, next)
    });
    Ok(Accelerated { value, bracket })
}

/// Index of the first nonzero term.
fn first_index(series: &Pfq) -> u64 {
    series.regularized_m().map_or(0, |m| m + 1)
}

fn max_param(series: &Pfq) -> f64 {
    series
        .upper()
        .iter()
        .chain(series.lower())
        .map(|a| crate::exact::to_f64(a).abs())
        .fold(1.0, f64::max)
}

/// Numerical value of a series to `prec` digits, using at most `max_terms`
/// terms where the series is summed directly.
pub fn eval_pfq_numeric(series: &Pfq, prec: Precision, max_terms: u64) -> Result<BigFloat> {
    if series.truncation().is_some() {
        return Ok(BigFloat::from_rational(&direct_sum(series, None)?, prec));
    }
    let p = series.p();
    let q = series.q();
    let z = series.arg();
    let abs_z = z.abs();
    if p > q + 1 || (p == q + 1 && abs_z > int(1)) {
        return Err(SpecialError::Divergent);
    }
    if p <= q || abs_z < int(1) {
        return ratio_bounded_sum(series, prec, max_terms);
    }
    let s = series.balance();
    if z.is_one() {
        if !s.is_positive() {
            return Err(SpecialError::Divergent);
        }
        return unit_argument_sum(series, prec);
    }
    if s <= int(-1) {
        return Err(SpecialError::Divergent);
    }
    let start = first_index(series);
    let mut t = series.term(start)?;
    let mut k = start;
    let work = prec.raised(5);
    let acc = accelerate_alternating(
        |j| {
            while k < start + j {
                t *= series.ratio(k).expect("no poles past the first term");
                k += 1;
            }
            t.clone()
        },
        work,
        None,
    )?;
    Ok(acc.value.with_precision(prec))
}

/// Direct summation with a geometric bound on the tail.
fn ratio_bounded_sum(series: &Pfq, prec: Precision, max_terms: u64) -> Result<BigFloat> {
    let work = prec.raised(5);
    let eps = BigFloat::ten_pow_neg(prec.decimal_digits() + 3, work);
    let start = first_index(series);
    let settle = (2.0 * max_param(series)).ceil() as u64 + 2;
    let z = crate::exact::to_f64(series.arg()).abs();
    let mut t = BigFloat::from_rational(&series.term(start)?, work);
    let mut sum = t.clone();
    for k in start..start + max_terms {
        let r = series.ratio(k)?;
        t = t.mul_rational(&r);
        sum = &sum + &t;
        let rho = crate::exact::to_f64(&r)
            .abs()
            .max(if series.p() > series.q() { z } else { 0.0 })
            + 1e-12;
        if k >= start + settle && rho < 1.0 {
            let bound = t.abs().mul_rational(
                &BigRational::from_float(1.0 / (1.0 - rho)).unwrap_or_else(|| int(2)),
            );
            if bound < eps {
                return Ok(sum.with_precision(prec));
            }
        }
    }
    Err(SpecialError::MaxTermsExceeded(max_terms))
}

/// Power series of `prod(1 + a u) / ((1 + u) prod(1 + b u))` up to `u^order`.
fn ratio_expansion(series: &Pfq, order: usize) -> Vec<BigRational> {
    let mut poly = vec![BigRational::zero(); order + 1];
    poly[0] = int(1);
    for a in series.upper() {
        for i in (1..=order).rev() {
            let add = &poly[i - 1] * a;
            poly[i] += add;
        }
    }
    let mut denoms: Vec<BigRational> = series.lower().to_vec();
    denoms.push(int(1));
    for b in &denoms {
        // divide by (1 + b u)
        for i in 1..=order {
            let sub = &poly[i - 1] * b;
            poly[i] -= sub;
        }
    }
    poly
}

/// Sum at argument 1 with positive balance: the first `N` terms directly and
/// the remainder `R_N = t_N * G(N)` from the asymptotic expansion
/// `G(N) = sum_j g_j N^(1-j)` solving `G(N) - r(N) G(N+1) = 1`.
fn unit_argument_sum(series: &Pfq, prec: Precision) -> Result<BigFloat> {
    let work = prec.raised(10);
    let start = first_index(series);
    let max_order = 4 * prec.decimal_digits() as usize + 60;
    let s = series.balance();
    let eps = BigFloat::ten_pow_neg(prec.decimal_digits() + 5, work);
    let mut n =
        ((2.0 * max_param(series)).ceil() as u64 + 2 * u64::from(prec.decimal_digits()) + 20)
            .max(start + 1);
    for _ in 0..6 {
        if let Some(tail) = asymptotic_remainder(series, &s, n, max_order, &eps) {
            let mut t = BigFloat::from_rational(&series.term(start)?, work);
            let mut sum = BigFloat::zero(work);
            for k in start..n {
                sum = &sum + &t;
                t = t.mul_rational(&series.ratio(k)?);
            }
            let rem = t.mul_rational(&tail);
            return Ok((sum + rem).with_precision(prec));
        }
        n *= 2;
    }
    Err(SpecialError::MaxTermsExceeded(n))
}

/// `G(N)` summed until its terms drop below `eps`, or `None` when the
/// expansion stops shrinking first.
///
/// The coefficients solve, order by order in `1/N`,
/// `(1-s-m) g_{m-1} + sum_{j<m-1} sum_{i+l=m-j} rho_i g_j binom(1-j, l) = -[m=1]`
/// where `rho_i` expand `r(N)`.
fn asymptotic_remainder(
    series: &Pfq,
    s: &BigRational,
    n: u64,
    max_order: usize,
    eps: &BigFloat,
) -> Option<BigRational> {
    let rho = ratio_expansion(series, max_order + 1);
    let nf = int(n as i64);
    // binoms[j][l] = binom(1-j, l)
    let mut binoms: Vec<Vec<BigRational>> = Vec::new();
    let mut g: Vec<BigRational> = Vec::new();
    let mut tail = BigRational::zero();
    let mut power = nf.clone();
    for m in 1..=max_order {
        let mut acc = if m == 1 { int(1) } else { BigRational::zero() };
        for j in 0..m.saturating_sub(1) {
            let row = &mut binoms[j];
            let top = int(1 - j as i64);
            while row.len() <= m - j {
                let l = row.len() as i64;
                let next = &row[row.len() - 1] * (&top - int(l - 1)) / int(l);
                row.push(next);
            }
            for l in 0..=(m - j) {
                acc += &rho[m - j - l] * &g[j] * &row[l];
            }
        }
        let gm = -acc / (int(1) - s - int(m as i64));
        binoms.push(vec![int(1)]);
        let term = &gm * &power;
        tail += &term;
        power /= &nf;
        g.push(gm);
        if BigFloat::from_rational(&term.abs(), eps.precision()) < *eps {
            return Some(tail);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;
    use crate::special::functions::{li2, ln, ln2, pi};

    #[test]
    fn alternating_harmonic_is_ln2() {
        let p = Precision::digits(50);
        let acc = accelerate_alternating(
            |k| rat(if k % 2 == 0 { 1 } else { -1 }, k as i64 + 1),
            p,
            Some(1000),
        )
        .unwrap();
        assert!(acc.value.within(&ln2(p), 50));
        let (lo, hi) = acc.bracket.unwrap();
        assert!(hi < acc.value && acc.value < lo);
    }

    #[test]
    fn rejects_non_alternating() {
        let p = Precision::digits(20);
        let r = accelerate_alternating(|k| rat(1, k as i64 + 1), p, None);
        assert!(matches!(r, Err(SpecialError::NotAlternating(1))));
    }

    #[test]
    fn geometric_rate_series() {
        let p = Precision::digits(30);
        let s: Pfq = "3F2(1/2,1,1;3/2,3/2;-1/4)".parse().unwrap();
        let v = eval_pfq_numeric(&s, p, 10_000).unwrap();
        assert_eq!(v.to_decimal(7), "0.9502396");
        let phi = (BigFloat::from_int(5, p).sqrt() - BigFloat::one(p)).div_int(2);
        let expect = pi(p).square().div_int(6) - ln(&phi).unwrap().square().mul_int(3);
        assert!(v.within(&expect, 30));
    }

    #[test]
    fn unit_argument_series() {
        let p = Precision::digits(50);
        let s: Pfq = "3F2(1,1,3/2;2,2;1)".parse().unwrap();
        let v = eval_pfq_numeric(&s, p, 10_000).unwrap();
        assert!(v.within(&ln2(p).mul_int(4), 50), "{v}");
        let zeta2: Pfq = "3F2(1,1,1;2,2;1)".parse().unwrap();
        let v = eval_pfq_numeric(&zeta2, p, 10_000).unwrap();
        assert!(v.within(&pi(p).square().div_int(6), 50), "{v}");
    }

    #[test]
    fn alternating_series_at_minus_one() {
        let p = Precision::digits(50);
        let s: Pfq = "3F2(1,1,1;2,2;-1)".parse().unwrap();
        let v = eval_pfq_numeric(&s, p, 10_000).unwrap();
        let expect = -li2(&BigFloat::from_int(-1, p)).unwrap();
        assert!(v.within(&expect, 50), "{v}");
    }

    #[test]
    fn terminating_is_exact() {
        let p = Precision::digits(40);
        let s: Pfq = "3F2(-1,1/2,1/2;3/2,-1/2;1)".parse().unwrap();
        assert_eq!(
            eval_pfq_numeric(&s, p, 10).unwrap(),
            BigFloat::from_rational(&rat(4, 3), p)
        );
    }

    #[test]
    fn divergence() {
        let p = Precision::digits(20);
        let s: Pfq = "2F1(1,1;2;1)".parse().unwrap();
        assert!(matches!(
            eval_pfq_numeric(&s, p, 100),
            Err(SpecialError::Divergent)
        ));
        let s: Pfq = "1F0(1;;2)".parse().unwrap();
        assert!(matches!(
            eval_pfq_numeric(&s, p, 100),
            Err(SpecialError::Divergent)
        ));
    }
}
