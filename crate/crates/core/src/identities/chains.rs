//! Replays the proof of each identity as a chain of registered rules.
//!
//! Every step appends the rule id (or the lemma it relies on) to the trace, so
//! a report shows which theorems carried the evaluation.

use num_traits::Zero;

use super::{find_identity, IdentityError, Result};
use crate::exact::{gamma_ratio, int, rat, BigRational};
use crate::hyper::{recognize, split_tail, Params, Pfq, SumSpec};
use crate::rules::{find_rule, ClosedValue, RuleError, TransformExpr};

pub(super) struct Chain {
    pub(super) trace: Vec<String>,
}

impl Chain {
    pub(super) fn new() -> Self {
        Self { trace: Vec::new() }
    }

    pub(super) fn note(&mut self, step: impl Into<String>) {
        self.trace.push(step.into());
    }

    pub(super) fn apply(&mut self, id: &str, series: &Pfq) -> Result<TransformExpr> {
        let rule = find_rule(id).expect("registered rule");
        let out = rule.apply(series)?;
        self.note(format!("{id}: {series}"));
        Ok(out)
    }

    /// Applies a rule whose result carries no further series.
    pub(super) fn close(&mut self, id: &str, series: &Pfq) -> Result<ClosedValue> {
        let expr = self.apply(id, series)?;
        if !expr.nodes.is_empty() {
            return Err(RuleError::NotApplicable(format!("{id} left a series behind")).into());
        }
        Ok(expr.addend.unwrap_or_default())
    }

    /// Applies a rule and sums what it leaves term by term.
    pub(super) fn then_direct(&mut self, id: &str, series: &Pfq) -> Result<ClosedValue> {
        let expr = self.apply(id, series)?;
        for (_, s) in &expr.nodes {
            self.note(format!("direct: {s}"));
        }
        Ok(expr.evaluate_exact()?)
    }
}

fn rational(v: &ClosedValue) -> Result<BigRational> {
    v.as_rational()
        .ok_or_else(|| RuleError::IrrationalResult.into())
}

/// Removes one occurrence of `x` from both parameter lists.
fn cancel_pair(series: &Pfq, x: &BigRational) -> Result<Pfq> {
    let mut up = series.upper().to_vec();
    let mut lo = series.lower().to_vec();
    let (i, j) = match (
        up.iter().position(|a| a == x),
        lo.iter().position(|b| b == x),
    ) {
        (Some(i), Some(j)) => (i, j),
        _ => return Err(RuleError::NotApplicable(format!("{x} is not on both sides")).into()),
    };
    up.remove(i);
    lo.remove(j);
    Ok(Pfq::new(up, lo, series.arg().clone())?)
}

fn same_params(series: &Pfq, upper: &[BigRational], lower: &[BigRational]) -> bool {
    let sorted = |v: &[BigRational]| {
        let mut v = v.to_vec();
        v.sort();
        v
    };
    sorted(series.upper()) == sorted(upper) && sorted(series.lower()) == sorted(lower)
}

/// `4F3(-n,1,1,1; 2,3/2,1/2-n; 1)`.
pub(super) fn trigamma_series(n: i64) -> Pfq {
    Pfq::new(
        vec![int(-n), int(1), int(1), int(1)],
        vec![int(2), rat(3, 2), rat(1, 2) - int(n)],
        int(1),
    )
    .expect("valid parameters")
}

/// `4F3(-1/2-n,-n,1,1; 3/2,1/2-n,1/2-n; 1)`.
pub(super) fn paired_trigamma_series(n: i64) -> Pfq {
    let h = rat(1, 2) - int(n);
    Pfq::new(
        vec![rat(-1, 2) - int(n), int(-n), int(1), int(1)],
        vec![rat(3, 2), h.clone(), h],
        int(1),
    )
    .expect("valid parameters")
}

/// Whipple's transformation of the trigamma 4F3, or of its paired companion
/// through the auxiliary identity `G = (2n+1) F`.
fn close_trigamma(chain: &mut Chain, series: &Pfq, n: i64) -> Result<BigRational> {
    let paired = paired_trigamma_series(n);
    if same_params(series, paired.upper(), paired.lower()) {
        chain.note(format!(
            "aux-induction: {series} = {} * {}",
            2 * n + 1,
            trigamma_series(n)
        ));
        return Ok(int(2 * n + 1) * close_trigamma(chain, &trigamma_series(n), n)?);
    }
    rational(&chain.then_direct("whipple-1-6", series)?)
}

/// `F1 = 3F2(1,1-n,1-n; n+2,n+2; 1)` through the two closed sums it reduces to.
pub(super) fn unit_reflected_value(chain: &mut Chain, n: i64) -> Result<BigRational> {
    let vander = Pfq::new(vec![int(-2 * n), int(-2 * n)], vec![int(1)], int(1))?;
    let refl = Pfq::new(
        vec![int(-n), int(-n), int(1)],
        vec![int(1 + n), int(1 + n)],
        int(1),
    )?;
    chain.note(format!(
        "gamma-reduction: 3F2(1,{},{};{},{};1)",
        1 - n,
        1 - n,
        n + 2,
        n + 2
    ));
    let v = rational(&chain.close("gauss-unit", &vander)?)?;
    let r = rational(&chain.close("p74431", &refl)?)?;
    // G(n)^2 G(n+2)^2 / G(2n+1)^2 and G(n)^2 G(n+2)^2 / G(n+1)^4
    let (gn, gn2) = (int(n), int(n + 2));
    let c1 = gamma_ratio(
        &[gn.clone(), gn.clone(), gn2.clone(), gn2.clone()],
        &[int(2 * n + 1), int(2 * n + 1)],
    )?;
    let c2 = gamma_ratio(
        &[gn.clone(), gn, gn2.clone(), gn2],
        &[int(n + 1), int(n + 1), int(n + 1), int(n + 1)],
    )?;
    let (c1, c2) = (
        c1.to_rational().expect("integer gammas"),
        c2.to_rational().expect("integer gammas"),
    );
    Ok(c1 * v - c2 * r)
}

fn recognized(id: &str, p: Params) -> Result<crate::hyper::Recognized> {
    let entry = find_identity(id).expect("registered");
    let spec = entry.sum_spec(p);
    Ok(recognize(&SumSpec::new(
        spec.term, spec.start, spec.end, p,
    ))?)
}

/// Value of the left side obtained by the proof's rule chain, with its trace.
pub fn chain_value(id: &str, p: Params) -> Result<(ClosedValue, Vec<String>)> {
    let entry = find_identity(id).ok_or_else(|| IdentityError::UnknownIdentity(id.to_string()))?;
    let mut chain = Chain::new();
    let rec = recognized(id, p)?;
    chain.note(format!("recognize: {} * {}", rec.prefactor, rec.series));
    let pref = rec.prefactor.clone() * entry.outer(p);
    let n = p.n;
    if rec.terms == Some(0) {
        chain.note("single term");
        return Ok((ClosedValue::rational(pref), chain.trace));
    }
    let value: ClosedValue = match id {
        "S0" => ClosedValue::rational(pref * rational(&chain.close("saalschutz", &rec.series)?)?),
        "S1" | "S2" => ClosedValue::rational(pref * close_trigamma(&mut chain, &rec.series, n)?),
        "S3" => {
            let split = chain.apply("split-p72320", &rec.series)?;
            let mut acc = BigRational::zero();
            for (c, s) in &split.nodes {
                acc += rational(c)? * close_trigamma(&mut chain, s, n)?;
            }
            ClosedValue::rational(pref * acc)
        }
        "S4" => {
            let shifted = chain.apply("shift-p7236", &rec.series)?;
            let mut acc = shifted.addend.clone().unwrap_or_default();
            for (c, s) in &shifted.nodes {
                acc = acc.add(&c.scale(&rational(&chain.close("gauss-unit", s)?)?));
            }
            acc.scale(&pref)
        }
        "S5" | "S9" => {
            let rule = if id == "S5" {
                "eval-p741365"
            } else {
                "eval-p74313"
            };
            chain.close(rule, &rec.series)?.scale(&pref)
        }
        "S6" => ClosedValue::rational(pref * s6_chain(&mut chain, &rec)?),
        "S7" => ClosedValue::rational(pref * s7_chain(&mut chain, &rec.series, n)?),
        "S8" => {
            let cut = rec.terms.expect("finite sum");
            let st = split_tail(&rec.series, cut)?;
            chain.note(format!(
                "split-tail at {cut}: {} - {} * {}",
                st.full, st.tail_prefactor, st.tail
            ));
            let full = rational(&chain.close("binom-1f0", &st.full)?)?;
            let tail = rational(&chain.close("gauss-second-half", &st.tail)?)?;
            ClosedValue::rational(pref * (full - st.tail_prefactor * tail))
        }
        _ => return Err(IdentityError::UnknownIdentity(id.to_string())),
    };
    Ok((value, chain.trace))
}

/// Complete Gauss sum minus its tail, the tail closed by Thomae's relation,
/// the unit-parameter reduction and Chu-Vandermonde.
fn s6_chain(chain: &mut Chain, rec: &crate::hyper::Recognized) -> Result<BigRational> {
    let cut = rec.terms.expect("finite sum");
    let st = split_tail(&rec.series, cut)?;
    chain.note(format!(
        "split-tail at {cut}: {} - {} * {}",
        st.full, st.tail_prefactor, st.tail
    ));
    let full = rational(&chain.close("gauss-unit", &st.full)?)?;
    let thomae = chain.apply("dlmf-16-4-11", &st.tail)?;
    let mut tail = BigRational::zero();
    for (c, s) in &thomae.nodes {
        if s.upper().iter().any(Zero::is_zero) {
            chain.note(format!("single term: {s}"));
            tail += rational(c)?;
            continue;
        }
        let reduced = chain.apply("reduce-p72317", s)?;
        let mut v = reduced
            .addend
            .as_ref()
            .map(rational)
            .transpose()?
            .unwrap_or_default();
        for (c2, s2) in &reduced.nodes {
            v += rational(c2)? * rational(&chain.close("gauss-unit", s2)?)?;
        }
        tail += rational(c)? * v;
    }
    Ok(full - st.tail_prefactor * tail)
}

/// The contiguous relation in the unit parameters, the three-term relation
/// for the raised 3F2 and the two closed sums.
fn s7_chain(chain: &mut Chain, series: &Pfq, n: i64) -> Result<BigRational> {
    let one = int(1);
    let contig = crate::rules::contiguous_upper(series, &one, &int(2))?;
    chain.note(format!("contig-p72325 (sigma = 1, rho = 2): {series}"));
    let mut acc = BigRational::zero();
    for (c, s) in &contig.nodes {
        let s = cancel_pair(s, &one)?;
        let v = if find_rule("p7536").expect("registered").applies(&s) {
            rational(&chain.close("p7536", &s)?)?
        } else {
            // F(a1) with a1 = 3: solve the relation at a1 = 2 for F(3)
            let base = Pfq::new(
                [vec![&s.upper()[0] - &one], s.upper()[1..].to_vec()].concat(),
                s.lower().to_vec(),
                s.arg().clone(),
            )?;
            let (cp, c0, cm) = crate::rules::three_term_upper(&base)?;
            chain.note(format!("dlmf-16-3-7: {base}"));
            if cp.is_zero() {
                return Err(RuleError::Pole("leading three-term coefficient".into()).into());
            }
            let f2 = rational(&chain.close("p7536", &base)?)?;
            let f1 = unit_reflected_value(chain, n)?;
            -(c0 * f2 + cm * f1) / cp
        };
        acc += rational(c)? * v;
    }
    Ok(acc)
}
