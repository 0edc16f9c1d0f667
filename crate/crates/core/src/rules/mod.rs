//! Summation theorems and transformations for hypergeometric series.
//!
//! Every rule is registered under a stable id and can be checked against
//! direct summation with [`check_rule`].

mod catalog;
mod oracle;
mod value;

use std::sync::OnceLock;

use thiserror::Error;

use crate::exact::ExactError;
use crate::hyper::{HyperError, Pfq};
use crate::special::SpecialError;

pub use catalog::{
    closed_dilog_3f2, closed_log_3f2, contiguous_upper, eval_dilog_3f2, eval_log_3f2,
    reduce_unit_parameter, shift_negative_lower, split_paired_parameters, sum_binomial_1f0,
    sum_gauss_second_half, sum_gauss_unit, sum_reciprocal_shift, sum_reflected_unit,
    sum_saalschutz, three_term_transform, three_term_upper, transform_thomae, transform_whipple,
};
pub use oracle::{check_rule, OracleReport, TrialFailure, ORACLE_DIGITS, ORACLE_TOLERANCE_DIGITS};
pub use value::{AtomTag, ClosedValue, Li2Arg, TransformExpr};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RuleError {
    #[error("rule does not apply: {0}")]
    NotApplicable(String),
    #[error("pole: {0}")]
    Pole(String),
    #[error("series diverges")]
    Divergent,
    #[error("result is not rational")]
    IrrationalResult,
    #[error("argument outside the domain: {0}")]
    Domain(String),
    #[error(transparent)]
    Hyper(#[from] HyperError),
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error(transparent)]
    Special(#[from] SpecialError),
}

pub type Result<T> = std::result::Result<T, RuleError>;

/// Whether a rule's output is checked exactly or to a tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleKind {
    Exact,
    Numeric,
}

pub struct Rule {
    pub id: &'static str,
    pub citation: &'static str,
    pub kind: RuleKind,
    apply: fn(&Pfq) -> Result<TransformExpr>,
}

impl Rule {
    pub fn applies(&self, series: &Pfq) -> bool {
        !matches!((self.apply)(series), Err(RuleError::NotApplicable(_)))
    }

    pub fn apply(&self, series: &Pfq) -> Result<TransformExpr> {
        (self.apply)(series)
    }
}

impl std::fmt::Debug for Rule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Rule")
            .field("id", &self.id)
            .field("citation", &self.citation)
            .finish()
    }
}

fn value_of(v: crate::exact::BigRational) -> TransformExpr {
    TransformExpr::value(ClosedValue::rational(v))
}

fn contiguous_default(series: &Pfq) -> Result<TransformExpr> {
    if series.p() < 2 {
        return Err(RuleError::NotApplicable(
            "needs two upper parameters".into(),
        ));
    }
    let rho = series.upper()[0].clone();
    let sigma = &series.upper()[1] - crate::exact::int(1);
    contiguous_upper(series, &sigma, &rho)
}

fn shift_rule(series: &Pfq) -> Result<TransformExpr> {
    let (pref, shifted) = shift_negative_lower(series)?;
    if pref.is_zero() {
        return Ok(TransformExpr::value(ClosedValue::zero()));
    }
    Ok(TransformExpr::single(pref, shifted))
}

fn thomae_rule(series: &Pfq) -> Result<TransformExpr> {
    let (pref, target) = transform_thomae(series)?;
    Ok(TransformExpr::single(
        ClosedValue::from_gamma(&pref),
        target,
    ))
}

/// All registered rules in a fixed order.
pub fn registry() -> &'static [Rule] {
    static REGISTRY: OnceLock<Vec<Rule>> = OnceLock::new();
    REGISTRY.get_or_init(|| {
        use RuleKind::*;
        vec![
            Rule {
                id: "saalschutz",
                citation: "Saalschütz's theorem for terminating balanced 3F2(1)",
                kind: Exact,
                apply: |s| sum_saalschutz(s).map(value_of),
            },
            Rule {
                id: "gauss-unit",
                citation: "Gauss's summation of 2F1(1); Chu-Vandermonde when terminating",
                kind: Exact,
                apply: |s| {
                    sum_gauss_unit(s).map(|g| TransformExpr::value(ClosedValue::from_gamma(&g)))
                },
            },
            Rule {
                id: "gauss-second-half",
                citation: "Gauss's second summation theorem, Prudnikov et al. 7.3.7(5)",
                kind: Exact,
                apply: |s| {
                    sum_gauss_second_half(s)
                        .map(|g| TransformExpr::value(ClosedValue::from_gamma(&g)))
                },
            },
            Rule {
                id: "binom-1f0",
                citation: "binomial theorem 1F0(a;;z) = (1-z)^(-a)",
                kind: Exact,
                apply: |s| sum_binomial_1f0(s).map(value_of),
            },
            Rule {
                id: "p7536",
                citation: "Prudnikov et al. 7.5.3(6)",
                kind: Exact,
                apply: |s| sum_reciprocal_shift(s).map(value_of),
            },
            Rule {
                id: "p74431",
                citation: "Prudnikov et al. 7.4.4(31)",
                kind: Exact,
                apply: |s| sum_reflected_unit(s).map(TransformExpr::value),
            },
            Rule {
                id: "whipple-1-6",
                citation: "Whipple's 4F3 transformation, Bailey (1.6)",
                kind: Exact,
                apply: transform_whipple,
            },
            Rule {
                id: "split-p72320",
                citation: "Prudnikov et al. 7.2.3(20)",
                kind: Exact,
                apply: split_paired_parameters,
            },
            Rule {
                id: "shift-p7236",
                citation: "Prudnikov et al. 7.2.3(6)",
                kind: Exact,
                apply: shift_rule,
            },
            Rule {
                id: "reduce-p72317",
                citation: "Prudnikov et al. 7.2.3(17), unit argument",
                kind: Exact,
                apply: reduce_unit_parameter,
            },
            Rule {
                id: "contig-p72325",
                citation: "Prudnikov et al. 7.2.3(25)",
                kind: Exact,
                apply: contiguous_default,
            },
            Rule {
                id: "dlmf-16-3-7",
                citation: "DLMF 16.3.7 at z = 1",
                kind: Exact,
                apply: three_term_transform,
            },
            Rule {
                id: "dlmf-16-4-11",
                citation: "DLMF 16.4.11",
                kind: Exact,
                apply: thomae_rule,
            },
            Rule {
                id: "eval-p741365",
                citation: "Prudnikov et al. 7.4.1(365)",
                kind: Numeric,
                apply: |s| closed_log_3f2(s).map(TransformExpr::value),
            },
            Rule {
                id: "eval-p74313",
                citation: "Prudnikov et al. 7.4.3(13)",
                kind: Numeric,
                apply: |s| closed_dilog_3f2(s).map(TransformExpr::value),
            },
        ]
    })
}

pub fn find_rule(id: &str) -> Option<&'static Rule> {
    registry().iter().find(|r| r.id == id)
}
