//! Command-line front end for the hypercomb engine.

mod report;

use std::ops::RangeInclusive;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hypercomb::hyper::{
    classify, direct_sum, parse_term_spec, recognize, HyperError, Params, Pfq, SumSpec,
};
use hypercomb::identities::{
    find_identity, verify_all, verify_identity, verify_lemma, GridConfig, IdentityError, Mode,
    VerificationReport, LEMMA_IDS,
};
use hypercomb::rules::{check_rule, find_rule, registry};
use hypercomb::special::{eval_pfq_numeric, Precision, SpecialError};
use rayon::prelude::*;

use report::{Format, Report, Run};

#[derive(Parser, Debug)]
#[command(
    name = "hypercomb",
    version,
    about = "Binomial sums as hypergeometric series"
)]
struct Cli {
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Worker threads for grid runs.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Verify identities or lemmas over parameter ranges.
    Verify(VerifyArgs),
    /// Recognize a summand as prefactor times a pFq series.
    Recognize(RecognizeArgs),
    /// Evaluate a pFq literal exactly or numerically.
    Eval(EvalArgs),
    /// Inspect and fuzz the rule database.
    Rules {
        #[command(subcommand)]
        action: RulesAction,
    },
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Identity id (S0..S9) or `all`.
    #[arg(long, conflicts_with = "lemma")]
    id: Option<String>,
    #[arg(long)]
    lemma: Option<String>,
    /// `a..b` (inclusive) or a single value.
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    m: Option<String>,
    #[arg(long)]
    k: Option<String>,
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    #[arg(long)]
    digits: Option<u32>,
    /// Replay the proof's rule chain and record its trace.
    #[arg(long)]
    chain: bool,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum ModeArg {
    Exact,
    Numeric,
}

#[derive(Args, Debug)]
struct RecognizeArgs {
    #[arg(long)]
    sum: String,
    #[arg(long, default_value_t = 0)]
    n: i64,
    #[arg(long, default_value_t = 0)]
    m: i64,
    #[arg(long, default_value = "0")]
    from: String,
    /// Upper limit: an integer, an affine expression in n and m such as `n-m`, or `inf`.
    #[arg(long, default_value = "n")]
    to: String,
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[arg(long)]
    pfq: String,
    #[arg(long, default_value_t = 30)]
    digits: u32,
}

#[derive(Subcommand, Debug)]
enum RulesAction {
    /// List rule ids with their citations.
    List,
    /// Randomized equivalence check against direct summation.
    Check {
        /// Rule id, or all rules when omitted.
        #[arg(long)]
        id: Option<String>,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 20240611)]
        seed: u64,
    },
}

/// A failure that maps to a specific exit code.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Math(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Math(_) => 3,
        }
    }
}

fn from_hyper(e: HyperError) -> Failure {
    match e {
        HyperError::Syntax { .. }
        | HyperError::UnknownSymbol { .. }
        | HyperError::InvalidSeries(_) => Failure::Usage(e.to_string()),
        _ => Failure::Math(e.to_string()),
    }
}

fn from_special(e: SpecialError) -> Failure {
    match e {
        SpecialError::Hyper(h) => from_hyper(h),
        other => Failure::Math(other.to_string()),
    }
}

fn parse_range(text: &str) -> Result<RangeInclusive<i64>, Failure> {
    let bad = || {
        Failure::Usage(format!(
            "bad range '{text}', expected a..b or a single integer"
        ))
    };
    let range = match text.split_once("..") {
        Some((a, b)) => {
            a.trim().parse().map_err(|_| bad())?..=b.trim().parse().map_err(|_| bad())?
        }
        None => {
            let v: i64 = text.trim().parse().map_err(|_| bad())?;
            v..=v
        }
    };
    if range.is_empty() {
        return Err(Failure::Usage(format!("empty range '{text}'")));
    }
    Ok(range)
}

fn optional_range(text: &Option<String>) -> Result<Option<RangeInclusive<i64>>, Failure> {
    text.as_deref().map(parse_range).transpose()
}

fn error_check(id: &str, params: &str, e: &IdentityError) -> VerificationReport {
    VerificationReport {
        id: id.to_string(),
        params: Default::default(),
        mode: Mode::Exact,
        lhs: params.to_string(),
        rhs: e.to_string(),
        status: hypercomb::identities::Status::Fail,
        abs_diff: None,
        tolerance: None,
        trace: None,
    }
}

fn verify(args: &VerifyArgs) -> Result<Report, Failure> {
    let ns = optional_range(&args.n)?;
    let ms = optional_range(&args.m)?;
    let ks = optional_range(&args.k)?;
    let mut run = Run::new("verify");
    run.digits = args.digits;

    if let Some(lemma) = &args.lemma {
        if !LEMMA_IDS.contains(&lemma.as_str()) {
            return Err(Failure::Usage(format!("unknown lemma {lemma}")));
        }
        let ns: Vec<i64> = ns.map(Iterator::collect).unwrap_or_else(|| vec![1]);
        let checks = ns
            .par_iter()
            .map(|&n| match verify_lemma(lemma, n) {
                Ok(r) => Ok(r),
                Err(IdentityError::OutOfDomain(msg)) => Err(Failure::Usage(msg)),
                Err(e) => Ok(error_check(lemma, &format!("n={n}"), &e)),
            })
            .collect::<Result<Vec<_>, _>>()?;
        return Ok(Report::checks(run, checks));
    }

    let id = args.id.as_deref().unwrap_or("all");
    if id == "all" {
        let mut cfg = GridConfig {
            chain: args.chain,
            ..GridConfig::default()
        };
        if let Some(n) = ns {
            cfg.n_max = *n.end();
        }
        return Ok(Report::checks(run, verify_all(&cfg)));
    }
    let entry =
        find_identity(id).ok_or_else(|| Failure::Usage(format!("unknown identity {id}")))?;
    if let Some(mode) = args.mode {
        let wanted = match mode {
            ModeArg::Exact => Mode::Exact,
            ModeArg::Numeric => Mode::Numeric,
        };
        if wanted != entry.mode {
            return Err(Failure::Usage(
                format!("{id} is verified in {:?} mode", entry.mode).to_lowercase(),
            ));
        }
    }
    if entry.mode == Mode::Numeric {
        if args.digits.is_some_and(|d| d < 10) {
            return Err(Failure::Usage(
                "numeric mode needs at least 10 digits".into(),
            ));
        }
        run.digits = Some(
            args.digits
                .unwrap_or(hypercomb::identities::numeric_defaults(id).0),
        );
        let r = verify_identity(id, Params::default(), args.digits, args.chain)
            .unwrap_or_else(|e| error_check(id, "", &e));
        return Ok(Report::checks(run, vec![r]));
    }

    let ns = ns.ok_or_else(|| Failure::Usage(format!("{id} needs --n")))?;
    let second = match entry.second {
        Some("m") => ms.clone(),
        Some(_) => ks.clone(),
        None => None,
    };
    let mut points = Vec::new();
    for n in ns {
        match (entry.second, &second) {
            (None, _) => points.push(Params::n(n)),
            (Some(_), Some(r)) => points.extend(r.clone().map(|j| Params::nm(n, j))),
            (Some(_), None) => points.extend((0..=n).map(|j| Params::nm(n, j))),
        }
    }
    points.retain(|p| entry.in_domain(*p));
    if points.is_empty() {
        return Err(Failure::Usage(format!(
            "no parameters of {id} in its domain"
        )));
    }
    let checks = points
        .par_iter()
        .map(|p| {
            verify_identity(id, *p, None, args.chain)
                .unwrap_or_else(|e| error_check(id, &format!("{p:?}"), &e))
        })
        .collect();
    Ok(Report::checks(run, checks))
}

/// Parses a summation limit such as `n`, `n-m`, `2n+1`, `5` or `inf`.
fn parse_limit(text: &str, n: i64, m: i64) -> Result<Option<i64>, Failure> {
    let t = text.trim();
    if matches!(t, "inf" | "infinity" | "oo") {
        return Ok(None);
    }
    let spec = parse_term_spec(t).map_err(from_hyper)?;
    let v = hypercomb::hyper::term_value(&spec, Params::nm(n, m), 0).map_err(from_hyper)?;
    if !v.is_integer() {
        return Err(Failure::Usage(format!("limit '{text}' is not an integer")));
    }
    Ok(Some(v.to_integer().try_into().map_err(|_| {
        Failure::Usage(format!("limit '{text}' is too large"))
    })?))
}

fn recognize_cmd(args: &RecognizeArgs) -> Result<Report, Failure> {
    let term = parse_term_spec(&args.sum).map_err(from_hyper)?;
    let start = parse_limit(&args.from, args.n, args.m)?
        .ok_or_else(|| Failure::Usage("the lower limit must be finite".into()))?;
    let end = parse_limit(&args.to, args.n, args.m)?;
    if end.is_some_and(|e| e < start) {
        return Err(Failure::Usage("empty summation range".into()));
    }
    let spec = SumSpec::new(term, start, end, Params::nm(args.n, args.m));
    let rec = recognize(&spec).map_err(from_hyper)?;
    let class = classify(&rec.series);
    let sum = match rec.terms {
        Some(_) => Some(rec.exact_sum().map_err(from_hyper)?.to_string()),
        None => None,
    };
    Ok(Report::recognized(Run::new("recognize"), &rec, &class, sum))
}

fn eval_cmd(args: &EvalArgs) -> Result<Report, Failure> {
    if args.digits < 10 {
        return Err(Failure::Usage("--digits must be at least 10".into()));
    }
    let series: Pfq = args.pfq.parse().map_err(from_hyper)?;
    let mut run = Run::new("eval");
    let value = if series.truncation().is_some() {
        direct_sum(&series, None).map_err(from_hyper)?.to_string()
    } else {
        run.digits = Some(args.digits);
        let prec = Precision::digits(args.digits);
        eval_pfq_numeric(&series, prec, 1_000_000)
            .map_err(from_special)?
            .to_decimal(args.digits)
    };
    Ok(Report::value(run, &series, value))
}

fn rules_cmd(action: &RulesAction) -> Result<Report, Failure> {
    match action {
        RulesAction::List => Ok(Report::rule_list(Run::new("rules list"), registry())),
        RulesAction::Check { id, trials, seed } => {
            let rules: Vec<_> =
                match id {
                    Some(id) => vec![find_rule(id)
                        .ok_or_else(|| Failure::Usage(format!("unknown rule {id}")))?],
                    None => registry().iter().collect(),
                };
            let mut run = Run::new("rules check");
            run.seed = Some(*seed);
            let reports = rules
                .par_iter()
                .map(|r| check_rule(r, *trials, *seed))
                .collect();
            Ok(Report::oracle(run, reports))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            eprintln!("error: --jobs must be positive");
            return ExitCode::from(2);
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .expect("thread pool set once");
    }
    let outcome = match &cli.command {
        Command::Verify(a) => verify(a),
        Command::Recognize(a) => recognize_cmd(a),
        Command::Eval(a) => eval_cmd(a),
        Command::Rules { action } => rules_cmd(action),
    };
    let report = match outcome {
        Ok(r) => r,
        Err(f) => {
            let (Failure::Usage(msg) | Failure::Math(msg)) = &f;
            eprintln!("error: {msg}");
            return ExitCode::from(f.code());
        }
    };
    let text = report.render(cli.format);
    match &cli.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &text) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    if report.all_passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
