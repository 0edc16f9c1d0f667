//! Report assembly and rendering as JSON or text.

use clap::ValueEnum;
use hypercomb::hyper::{Classification, Pfq, Recognized};
use hypercomb::identities::VerificationReport;
use hypercomb::rules::{OracleReport, Rule, TrialFailure};
use serde::Serialize;

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Serialize)]
pub struct Run {
    pub command: String,
    pub seed: Option<u64>,
    pub digits: Option<u32>,
}

impl Run {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            seed: None,
            digits: None,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct OracleCheck {
    pub id: String,
    pub status: &'static str,
    pub seed: u64,
    pub trials: usize,
    pub passed: usize,
    pub resampled: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<TrialFailure>,
}

#[derive(Debug, Serialize)]
pub struct RecognizedOut {
    pub prefactor: String,
    pub series: String,
    pub upper: Vec<String>,
    pub lower: Vec<String>,
    pub arg: String,
    pub regularized: bool,
    pub reversed: bool,
    pub terms: Option<u64>,
    pub terminating: bool,
    pub balance: String,
    pub saalschutzian: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sum: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct RuleOut {
    pub id: &'static str,
    pub citation: &'static str,
}

#[derive(Debug, Serialize)]
#[serde(untagged)]
pub enum Body {
    Checks { checks: Vec<VerificationReport> },
    Oracle { checks: Vec<OracleCheck> },
    Recognized { recognized: RecognizedOut },
    Value { series: String, value: String },
    Rules { rules: Vec<RuleOut> },
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub run: Run,
    #[serde(flatten)]
    pub body: Body,
}

fn strings(v: &[hypercomb::exact::BigRational]) -> Vec<String> {
    v.iter().map(ToString::to_string).collect()
}

impl Report {
    pub fn checks(run: Run, checks: Vec<VerificationReport>) -> Self {
        Self {
            run,
            body: Body::Checks { checks },
        }
    }

    pub fn oracle(run: Run, reports: Vec<OracleReport>) -> Self {
        let checks = reports
            .into_iter()
            .map(|r| OracleCheck {
                status: if r.ok() { "pass" } else { "fail" },
                id: r.rule,
                seed: r.seed,
                trials: r.trials,
                passed: r.passed,
                resampled: r.resampled,
                counterexample: r.minimized,
            })
            .collect();
        Self {
            run,
            body: Body::Oracle { checks },
        }
    }

    pub fn recognized(
        run: Run,
        rec: &Recognized,
        class: &Classification,
        sum: Option<String>,
    ) -> Self {
        let s = &rec.series;
        let recognized = RecognizedOut {
            prefactor: rec.prefactor.to_string(),
            series: s.to_string(),
            upper: strings(s.upper()),
            lower: strings(s.lower()),
            arg: s.arg().to_string(),
            regularized: s.is_regularized(),
            reversed: rec.reversed,
            terms: rec.terms,
            terminating: class.terminating,
            balance: class.balance.to_string(),
            saalschutzian: class.saalschutzian,
            sum,
        };
        Self {
            run,
            body: Body::Recognized { recognized },
        }
    }

    pub fn value(run: Run, series: &Pfq, value: String) -> Self {
        Self {
            run,
            body: Body::Value {
                series: series.to_string(),
                value,
            },
        }
    }

    pub fn rule_list(run: Run, rules: &[Rule]) -> Self {
        let rules = rules
            .iter()
            .map(|r| RuleOut {
                id: r.id,
                citation: r.citation,
            })
            .collect();
        Self {
            run,
            body: Body::Rules { rules },
        }
    }

    pub fn all_passed(&self) -> bool {
        match &self.body {
            Body::Checks { checks } => checks.iter().all(VerificationReport::passed),
            Body::Oracle { checks } => checks.iter().all(|c| c.status == "pass"),
            _ => true,
        }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => serde_json::to_string_pretty(self).expect("report serializes") + "\n",
            Format::Text => self.text(),
        }
    }

    fn text(&self) -> String {
        let mut out = String::new();
        let mut line = |s: String| {
            out.push_str(&s);
            out.push('\n');
        };
        match &self.body {
            Body::Checks { checks } => {
                for c in checks {
                    let params: Vec<String> =
                        c.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
                    let status = if c.passed() { "PASS" } else { "FAIL" };
                    let mut s = format!(
                        "{status} {} {} lhs={} rhs={}",
                        c.id,
                        params.join(","),
                        c.lhs,
                        c.rhs
                    );
                    if let (Some(d), Some(t)) = (&c.abs_diff, &c.tolerance) {
                        s += &format!(" |diff|={d} tol={t}");
                    }
                    line(s);
                    for step in c.trace.iter().flatten() {
                        line(format!("    {step}"));
                    }
                }
                let passed = checks.iter().filter(|c| c.passed()).count();
                line(format!("{passed}/{} checks passed", checks.len()));
            }
            Body::Oracle { checks } => {
                for c in checks {
                    line(format!(
                        "{} {} seed={} {}/{} trials passed, {} resampled",
                        c.status.to_uppercase(),
                        c.id,
                        c.seed,
                        c.passed,
                        c.trials,
                        c.resampled
                    ));
                    if let Some(f) = &c.counterexample {
                        line(format!(
                            "    counterexample {}: expected {}, got {}",
                            f.instance, f.expected, f.got
                        ));
                    }
                }
            }
            Body::Recognized { recognized: r } => {
                line(format!("prefactor: {}", r.prefactor));
                line(format!("series: {}", r.series));
                line(format!("upper: [{}]", r.upper.join(", ")));
                line(format!("lower: [{}]", r.lower.join(", ")));
                line(format!("arg: {}", r.arg));
                let mut kind = Vec::new();
                if r.terminating {
                    kind.push("terminating".to_string());
                }
                if let Some(t) = r.terms {
                    kind.push(format!("summed to k={t}"));
                }
                if r.regularized {
                    kind.push("regularized".into());
                }
                if r.reversed {
                    kind.push("reversed".into());
                }
                if r.saalschutzian {
                    kind.push("Saalschutzian".into());
                }
                line(format!("balance: {}", r.balance));
                line(format!(
                    "classification: {}",
                    if kind.is_empty() {
                        "non-terminating".into()
                    } else {
                        kind.join(", ")
                    }
                ));
                if let Some(s) = &r.sum {
                    line(format!("sum: {s}"));
                }
            }
            Body::Value { series, value } => line(format!("{series} = {value}")),
            Body::Rules { rules } => {
                for r in rules {
                    line(format!("{:<14} {}", r.id, r.citation));
                }
            }
        }
        out
    }
}
