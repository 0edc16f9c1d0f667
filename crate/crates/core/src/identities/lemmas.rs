//! Intermediate equalities of the proofs, each checked on its own.

use std::collections::BTreeMap;

use num_bigint::BigInt;

use super::chains::{paired_trigamma_series, trigamma_series, unit_reflected_value, Chain};
use super::{GridConfig, IdentityError, Mode, Result, VerificationReport};
use crate::exact::{factorial, int, rat, BigRational};
use crate::hyper::{direct_sum, split_tail, Pfq};
use crate::rules::{closed_dilog_3f2, find_rule, three_term_upper, AtomTag, ClosedValue, Li2Arg};
use crate::special::{eval_pfq_numeric, pi2_minus_trigamma_half, Precision};

pub const LEMMA_IDS: &[&str] = &[
    "3.2",
    "3.4",
    "aux-induction",
    "8.2",
    "8.3",
    "8.4",
    "8.5",
    "8.6",
    "8.7",
    "10.3",
    "10.4",
    "S8-chain",
];

const NUMERIC_DIGITS: u32 = 60;
const NUMERIC_TOLERANCE: u32 = 50;

fn smallest_n(id: &str) -> Option<i64> {
    match id {
        "3.2" | "3.4" | "aux-induction" | "S8-chain" => Some(0),
        "8.2" | "8.3" | "8.4" | "8.5" | "8.6" | "8.7" => Some(1),
        _ => None,
    }
}

pub(super) fn lemma_grid(id: &str, cfg: &GridConfig) -> Vec<i64> {
    match smallest_n(id) {
        Some(lo) => (lo..=cfg.lemma_n_max).collect(),
        None if cfg.numeric => vec![0],
        None => Vec::new(),
    }
}

fn pfq(upper: Vec<BigRational>, lower: Vec<BigRational>) -> Result<Pfq> {
    Ok(Pfq::new(upper, lower, int(1))?)
}

fn fact(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(factorial(n as u64)))
}

/// `3F2(a1, 1-n, 1-n; n+2, n+2; 1)`.
fn f_at(a1: i64, n: i64) -> Result<Pfq> {
    pfq(
        vec![int(a1), int(1 - n), int(1 - n)],
        vec![int(n + 2), int(n + 2)],
    )
}

/// `4F3(2, 2, 1-n, 1-n; 1, n+2, n+2; 1)`, the series of the Catalan sum.
fn catalan_series(n: i64) -> Result<Pfq> {
    pfq(
        vec![int(2), int(2), int(1 - n), int(1 - n)],
        vec![int(1), int(n + 2), int(n + 2)],
    )
}

struct Check {
    lhs: BigRational,
    rhs: BigRational,
    /// Further values that must equal `lhs`.
    routes: Vec<BigRational>,
}

fn exact_lemma(id: &str, n: i64, chain: &mut Chain) -> Result<Check> {
    let half_bracket = || pi2_minus_trigamma_half(n as u64);
    let check = match id {
        "3.2" => {
            let f = trigamma_series(n);
            let whipple = find_rule("whipple-1-6")
                .expect("registered")
                .apply(&f)?
                .evaluate_exact()?;
            chain.note(format!("whipple-1-6: {f}"));
            Check {
                lhs: direct_sum(&f, None)?,
                rhs: rat(2 * n + 1, 4 * (n + 1)) * half_bracket(),
                routes: whipple.as_rational().into_iter().collect(),
            }
        }
        "3.4" => Check {
            lhs: direct_sum(&paired_trigamma_series(n), None)?,
            rhs: rat((2 * n + 1) * (2 * n + 1), 4 * (n + 1)) * half_bracket(),
            routes: Vec::new(),
        },
        "aux-induction" => Check {
            lhs: direct_sum(&paired_trigamma_series(n), None)?,
            rhs: int(2 * n + 1) * direct_sum(&trigamma_series(n), None)?,
            routes: Vec::new(),
        },
        "8.2" => {
            let s = catalan_series(n)?;
            let contig = crate::rules::contiguous_upper(&s, &int(1), &int(2))?.evaluate_exact()?;
            chain.note(format!("contig-p72325: {s}"));
            Check {
                lhs: direct_sum(&s, None)?,
                rhs: int(2) * direct_sum(&f_at(3, n)?, None)? - direct_sum(&f_at(2, n)?, None)?,
                routes: contig.as_rational().into_iter().collect(),
            }
        }
        "8.3" => {
            let f2 = f_at(2, n)?;
            let rule = chain.close("p7536", &f2)?;
            Check {
                lhs: direct_sum(&f2, None)?,
                rhs: rat((n + 1) * (n + 1), 4 * n),
                routes: rule.as_rational().into_iter().collect(),
            }
        }
        "8.4" => {
            let f1 = direct_sum(&f_at(1, n)?, None)?;
            let (cp, c0, cm) = three_term_upper(&f_at(2, n)?)?;
            chain.note(format!("dlmf-16-3-7: {}", f_at(2, n)?));
            let f2 = rat((n + 1) * (n + 1), 4 * n);
            Check {
                lhs: direct_sum(&f_at(3, n)?, None)?,
                rhs: rat(n * n, 2 * (4 * n - 1)) * &f1
                    - rat((1 - 6 * n) * (n + 1) * (n + 1), 8 * n * (4 * n - 1)),
                routes: vec![-(c0 * f2 + cm * f1) / cp],
            }
        }
        "8.5" => Check {
            lhs: direct_sum(&catalan_series(n)?, None)?,
            rhs: rat(n * n, 4 * n - 1) * direct_sum(&f_at(1, n)?, None)?
                + rat((n + 1) * (n + 1), 2 * (4 * n - 1)),
            routes: Vec::new(),
        },
        "8.6" => {
            let refl = pfq(vec![int(-n), int(-n), int(1)], vec![int(1 + n), int(1 + n)])?;
            let g = fact(n - 1) * fact(n - 1) * fact(n + 1) * fact(n + 1);
            let f2n = fact(2 * n);
            let fn1 = fact(n);
            let rhs = &g * fact(4 * n) / (&f2n * &f2n * &f2n * &f2n)
                - &g / (&fn1 * &fn1 * &fn1 * &fn1) * direct_sum(&refl, None)?;
            Check {
                lhs: direct_sum(&f_at(1, n)?, None)?,
                rhs,
                routes: vec![unit_reflected_value(chain, n)?],
            }
        }
        "8.7" => {
            let refl = pfq(vec![int(-n), int(-n), int(1)], vec![int(1 + n), int(1 + n)])?;
            let (fn1, f2n) = (fact(n), fact(2 * n));
            let ratio = &fn1 * &fn1 * &fn1 * &fn1 * fact(4 * n) / (&f2n * &f2n * &f2n * &f2n);
            let rule = chain.close("p74431", &refl)?;
            Check {
                lhs: direct_sum(&refl, None)?,
                rhs: rat(1, 2) + rat(1, 2) * ratio,
                routes: rule.as_rational().into_iter().collect(),
            }
        }
        "S8-chain" => {
            let full = Pfq::new(vec![int(n + 1)], vec![], rat(1, 2))?;
            let st = split_tail(&full, n as u64)?;
            chain.note(format!(
                "split-tail at {n}: {} * {}",
                st.tail_prefactor, st.tail
            ));
            let f21 = chain
                .close("gauss-second-half", &st.tail)?
                .as_rational()
                .expect("rational");
            let two = BigRational::from_integer(BigInt::from(2));
            let pow = num_traits::pow::pow(two, n as usize + 1);
            // 2^-(n+1) G(2n+2) / (G(n+1) G(n+2))
            let pref = fact(2 * n + 1) / (fact(n) * fact(n + 1)) / &pow;
            Check {
                lhs: direct_sum(&full, Some(n as u64))?,
                rhs: num_traits::pow::pow(int(2), n as usize),
                routes: vec![
                    &pow - &pref * f21,
                    pow - st.tail_prefactor * f21_check(&st.tail)?,
                ],
            }
        }
        _ => return Err(IdentityError::UnknownLemma(id.to_string())),
    };
    Ok(check)
}

/// The tail through the rule, for comparison with the explicit prefactor.
fn f21_check(tail: &Pfq) -> Result<BigRational> {
    let v = find_rule("gauss-second-half")
        .expect("registered")
        .apply(tail)?
        .evaluate_exact()?;
    Ok(v.as_rational().expect("rational"))
}

fn numeric_lemma(id: &str) -> Result<VerificationReport> {
    let prec = Precision::digits(NUMERIC_DIGITS);
    let li2 = |arg: Li2Arg| ClosedValue::atom(AtomTag::Li2(arg), int(1));
    let (lhs, rhs, trace) = match id {
        "10.3" => {
            let series = Pfq::new(
                vec![rat(1, 2), int(1), int(1)],
                vec![rat(3, 2), rat(3, 2)],
                rat(-1, 4),
            )?;
            let closed = closed_dilog_3f2(&series)?;
            (
                eval_pfq_numeric(&series, prec, 10_000)?,
                closed.to_bigfloat(prec)?,
                vec![format!("eval-p74313: {series}")],
            )
        }
        "10.4" => {
            let diff = li2(Li2Arg::SqrtFiveMinusTwo).sub(&li2(Li2Arg::TwoMinusSqrtFive));
            let closed = ClosedValue::atom(AtomTag::Pi2, rat(1, 12))
                .add(&ClosedValue::atom(AtomTag::LnSqPhi, rat(-3, 2)));
            (
                diff.to_bigfloat(prec)?,
                closed.to_bigfloat(prec)?,
                Vec::new(),
            )
        }
        _ => return Err(IdentityError::UnknownLemma(id.to_string())),
    };
    let mut report =
        VerificationReport::numeric(id, BTreeMap::new(), &lhs, &rhs, NUMERIC_TOLERANCE);
    if !trace.is_empty() {
        report = report.with_trace(trace);
    }
    Ok(report)
}

/// Checks lemma `id` at `n` (ignored for the constant lemmas).
pub fn verify_lemma(id: &str, n: i64) -> Result<VerificationReport> {
    if !LEMMA_IDS.contains(&id) {
        return Err(IdentityError::UnknownLemma(id.to_string()));
    }
    let Some(lo) = smallest_n(id) else {
        return numeric_lemma(id);
    };
    if n < lo {
        return Err(IdentityError::OutOfDomain(format!(
            "lemma {id} needs n >= {lo}"
        )));
    }
    let mut chain = Chain::new();
    let check = exact_lemma(id, n, &mut chain)?;
    let params = BTreeMap::from([("n".to_string(), n)]);
    let mut report = VerificationReport::exact(id, params, &check.lhs, &check.rhs);
    let bad = check.routes.iter().any(|r| *r != check.lhs);
    report = report.fail_if(bad);
    if !chain.trace.is_empty() {
        report = report.with_trace(chain.trace);
    }
    debug_assert_eq!(report.mode, Mode::Exact);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn documented_values() {
        let r = verify_lemma("3.2", 1).unwrap();
        assert_eq!((r.lhs.as_str(), r.passed()), ("5/3", true));
        let r = verify_lemma("3.4", 1).unwrap();
        assert_eq!((r.lhs.as_str(), r.passed()), ("5", true));
        let r = verify_lemma("aux-induction", 1).unwrap();
        assert_eq!((r.lhs.as_str(), r.rhs.as_str()), ("5", "5"));
        let r = verify_lemma("8.7", 1).unwrap();
        assert_eq!((r.lhs.as_str(), r.passed()), ("5/4", true));
        let r = verify_lemma("8.3", 2).unwrap();
        assert_eq!((r.lhs.as_str(), r.passed()), ("9/8", true));
    }

    #[test]
    fn all_lemmas_hold_for_small_n() {
        for id in LEMMA_IDS {
            for n in 0..=12 {
                match verify_lemma(id, n) {
                    Ok(r) => assert!(r.passed(), "{id} n={n}: {r:?}"),
                    Err(IdentityError::OutOfDomain(_)) => assert!(n < 1),
                    Err(e) => panic!("{id} n={n}: {e}"),
                }
            }
        }
    }

    #[test]
    fn unknown_lemma() {
        assert!(matches!(
            verify_lemma("9.9", 1),
            Err(IdentityError::UnknownLemma(_))
        ));
    }
}
