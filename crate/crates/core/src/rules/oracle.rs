//! Randomized equivalence checks of every rule against direct summation.

use num_traits::Signed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{Rule, RuleError, RuleKind};
use crate::exact::{int, rat, BigRational};
use crate::hyper::{direct_sum, HyperError, Pfq};
use crate::special::{eval_pfq_numeric, Precision};

/// Working precision for the function-valued rules.
pub const ORACLE_DIGITS: u32 = 50;
/// Required agreement for the function-valued rules, `10^-(digits-10)`.
pub const ORACLE_TOLERANCE_DIGITS: u32 = ORACLE_DIGITS - 10;

const MAX_RESAMPLES: usize = 200;
const NUMERIC_MAX_TERMS: u64 = 200_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TrialFailure {
    pub instance: String,
    pub expected: String,
    pub got: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OracleReport {
    pub rule: String,
    pub seed: u64,
    pub trials: usize,
    pub passed: usize,
    /// Instances rejected for poles or invalid parameters before a trial counted.
    pub resampled: usize,
    pub failures: Vec<TrialFailure>,
    /// The failing instance with the smallest parameters found.
    pub minimized: Option<TrialFailure>,
}

impl OracleReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty() && self.passed == self.trials
    }
}

fn small(rng: &mut ChaCha8Rng, size: i64) -> BigRational {
    let q = rng.gen_range(1..=4);
    let p = rng.gen_range(-4 * size..=4 * size);
    rat(p, q)
}

fn count(rng: &mut ChaCha8Rng, size: i64) -> i64 {
    rng.gen_range(0..=size + 2)
}

fn plain(upper: Vec<BigRational>, lower: Vec<BigRational>, z: BigRational) -> Option<Pfq> {
    Pfq::new(upper, lower, z).ok()
}

/// A random admissible instance for the rule, or `None` to resample.
fn sample(id: &str, rng: &mut ChaCha8Rng, size: i64) -> Option<Pfq> {
    let one = int(1);
    match id {
        "saalschutz" => {
            let n = int(count(rng, size));
            let (a, b, c) = (small(rng, size), small(rng, size), small(rng, size));
            let d = &one + &a + &b - &c - &n;
            plain(vec![-n, a, b], vec![c, d], one)
        }
        "gauss-unit" => {
            let n = int(-count(rng, size));
            let b = small(rng, size);
            let up = if rng.gen() { vec![n, b] } else { vec![b, n] };
            plain(up, vec![small(rng, size)], one)
        }
        "gauss-second-half" => {
            let a = int(-2 * count(rng, size));
            let b = small(rng, size);
            let c = (&a + &b + &one) / int(2);
            plain(vec![a, b], vec![c], rat(1, 2))
        }
        "binom-1f0" => plain(vec![int(-count(rng, size))], vec![], small(rng, size)),
        "p7536" => {
            let a = int(-count(rng, size));
            let (b, c) = (small(rng, size), small(rng, size));
            let three = int(3);
            plain(
                vec![one.clone(), a.clone(), b.clone(), c.clone()],
                vec![&three - a, &three - b, three - c],
                one,
            )
        }
        "p74431" => {
            let a = int(-count(rng, size));
            let b = small(rng, size);
            let m = int(rng.gen_range(-1..=3));
            plain(
                vec![a.clone(), b.clone(), one.clone()],
                vec![-&m - a, -m - b],
                one,
            )
        }
        "whipple-1-6" => {
            let n = int(count(rng, size));
            let a: Vec<BigRational> = (0..3).map(|_| small(rng, size)).collect();
            let (b1, b2) = (small(rng, size), small(rng, size));
            let s = &b1 + &b2 - &a[0] - &a[1] - &a[2];
            let b3 = &one - s - &n;
            plain(
                vec![-n, a[0].clone(), a[1].clone(), a[2].clone()],
                vec![b1, b2, b3],
                one,
            )
        }
        "split-p72320" => {
            let n = int(-count(rng, size));
            let (a, b) = (small(rng, size), small(rng, size));
            let (rho, sigma) = (small(rng, size), small(rng, size));
            if rho == sigma {
                return None;
            }
            plain(
                vec![n, a, rho.clone(), sigma.clone()],
                vec![b, rho + &one, sigma + &one],
                small(rng, size),
            )
        }
        "shift-p7236" => {
            let n = int(-count(rng, size));
            let m = int(-rng.gen_range(0..=size));
            let up = vec![n, small(rng, size), small(rng, size)];
            Pfq::regularized(up, vec![small(rng, size), m], small(rng, size)).ok()
        }
        "reduce-p72317" => {
            let n = int(-count(rng, size));
            plain(
                vec![n, small(rng, size), one.clone()],
                vec![small(rng, size), int(2)],
                one,
            )
        }
        "contig-p72325" => {
            let (rho, sigma) = (small(rng, size), small(rng, size));
            let n = int(-count(rng, size));
            plain(
                vec![rho, sigma + &one, n],
                vec![small(rng, size), small(rng, size)],
                small(rng, size),
            )
        }
        "dlmf-16-3-7" => {
            let n = int(-count(rng, size));
            plain(
                vec![small(rng, size), n, small(rng, size)],
                vec![small(rng, size), small(rng, size)],
                one,
            )
        }
        "dlmf-16-4-11" => {
            let m = int(-count(rng, size));
            let (d, e, a) = (small(rng, size), small(rng, size), small(rng, size));
            let c = &d + int(count(rng, size));
            plain(vec![m, c, a], vec![e, d], one)
        }
        "eval-p741365" => {
            let q = rng.gen_range(1..=8);
            let z = rat(rng.gen_range(-q..=q), q);
            plain(vec![one.clone(), one, rat(3, 2)], vec![int(2), int(2)], z)
        }
        "eval-p74313" => {
            let q = rng.gen_range(1..=8);
            let z = rat(rng.gen_range(1..=q), q);
            plain(
                vec![rat(1, 2), one.clone(), one],
                vec![rat(3, 2), rat(3, 2)],
                -z,
            )
        }
        _ => None,
    }
}

/// Errors that mean "draw another instance" rather than "the rule is wrong".
fn is_rejection(e: &RuleError) -> bool {
    matches!(
        e,
        RuleError::Pole(_)
            | RuleError::Exact(_)
            | RuleError::Hyper(
                HyperError::InvalidSeries(_) | HyperError::Pole(_) | HyperError::DivisionByZero(_)
            )
    )
}

enum Outcome {
    Pass,
    Fail(TrialFailure),
    Reject,
}

fn run_trial(rule: &Rule, series: &Pfq) -> Outcome {
    let expr = match rule.apply(series) {
        Ok(e) => e,
        Err(e) if is_rejection(&e) => return Outcome::Reject,
        Err(e) => {
            return Outcome::Fail(TrialFailure {
                instance: series.to_string(),
                expected: "rule applies".into(),
                got: e.to_string(),
            })
        }
    };
    let fail = |expected: String, got: String| {
        Outcome::Fail(TrialFailure {
            instance: series.to_string(),
            expected,
            got,
        })
    };
    match rule.kind {
        RuleKind::Exact => {
            let expected = match direct_sum(series, None) {
                Ok(v) => v,
                Err(_) => return Outcome::Reject,
            };
            match expr.evaluate_exact() {
                Ok(v) if v.as_rational().as_ref() == Some(&expected) => Outcome::Pass,
                Ok(v) => fail(expected.to_string(), v.to_string()),
                Err(e) if is_rejection(&e) => Outcome::Reject,
                Err(e) => fail(expected.to_string(), e.to_string()),
            }
        }
        RuleKind::Numeric => {
            let prec = Precision::digits(ORACLE_DIGITS);
            let expected = match eval_pfq_numeric(series, prec, NUMERIC_MAX_TERMS) {
                Ok(v) => v,
                Err(e) => return fail("numeric series value".into(), e.to_string()),
            };
            match expr.evaluate_numeric(prec) {
                Ok(v) if v.within(&expected, ORACLE_TOLERANCE_DIGITS) => Outcome::Pass,
                Ok(v) => fail(expected.to_string(), v.to_string()),
                Err(e) => fail(expected.to_string(), e.to_string()),
            }
        }
    }
}

/// Sum of numerator and denominator sizes over all parameters.
fn height(series: &Pfq) -> u64 {
    let h = |x: &BigRational| x.numer().abs().bits() + x.denom().bits();
    series
        .upper()
        .iter()
        .chain(series.lower())
        .chain(std::iter::once(series.arg()))
        .map(h)
        .sum()
}

fn draw(
    rule: &Rule,
    rng: &mut ChaCha8Rng,
    size: i64,
    resampled: &mut usize,
) -> Option<(Pfq, Outcome)> {
    for _ in 0..MAX_RESAMPLES {
        if let Some(s) = sample(rule.id, rng, size) {
            match run_trial(rule, &s) {
                Outcome::Reject => {}
                out => return Some((s, out)),
            }
        }
        *resampled += 1;
    }
    None
}

/// Runs `trials` random admissible instances of `rule` from `seed`.
pub fn check_rule(rule: &Rule, trials: usize, seed: u64) -> OracleReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = OracleReport {
        rule: rule.id.to_string(),
        seed,
        trials,
        passed: 0,
        resampled: 0,
        failures: Vec::new(),
        minimized: None,
    };
    let mut worst: Option<(u64, TrialFailure)> = None;
    let note = |s: &Pfq, f: &TrialFailure, worst: &mut Option<(u64, TrialFailure)>| {
        let h = height(s);
        if worst.as_ref().map_or(true, |(w, _)| h < *w) {
            *worst = Some((h, f.clone()));
        }
    };
    for _ in 0..trials {
        match draw(rule, &mut rng, 3, &mut report.resampled) {
            Some((_, Outcome::Pass)) => report.passed += 1,
            Some((s, Outcome::Fail(f))) => {
                note(&s, &f, &mut worst);
                report.failures.push(f);
            }
            _ => report.failures.push(TrialFailure {
                instance: "<none>".into(),
                expected: "an admissible instance".into(),
                got: format!("{MAX_RESAMPLES} rejected draws"),
            }),
        }
    }
    if !report.failures.is_empty() {
        // look for a smaller witness among low-height draws
        for size in 0..=1 {
            for _ in 0..100 {
                if let Some((s, Outcome::Fail(f))) = draw(rule, &mut rng, size, &mut 0) {
                    note(&s, &f, &mut worst);
                }
            }
        }
    }
    report.minimized = worst.map(|(_, f)| f);
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rules::registry;

    #[test]
    fn every_rule_has_a_sampler() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for rule in registry() {
            assert!(
                (0..50).any(|_| sample(rule.id, &mut rng, 3).is_some()),
                "{}",
                rule.id
            );
        }
    }

    #[test]
    fn a_wrong_rule_is_caught() {
        let broken = Rule {
            id: "gauss-unit",
            citation: "",
            kind: RuleKind::Exact,
            apply: |_| Ok(crate::rules::TransformExpr::value(int(1).into())),
        };
        let report = check_rule(&broken, 50, 3);
        assert!(!report.ok());
        let min = report.minimized.clone().expect("a counterexample");
        assert_ne!(min.expected, "1");
        assert_eq!(check_rule(&broken, 50, 3), report);
    }

    #[test]
    fn height_is_deterministic() {
        let s: Pfq = "2F1(-1,1/2;3;1)".parse().unwrap();
        let t: Pfq = "2F1(-1,1/2;3;1)".parse().unwrap();
        assert!(height(&s) > 0);
        assert_eq!(height(&s), height(&t));
    }
}
