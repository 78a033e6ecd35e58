//! Argument handling and output formatting behind the `fracineq` binary.
//!
//! Exit codes: 0 success, 1 evaluation failure, 2 invalid arguments,
//! 3 a must-hold bound was violated during `verify`.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fracineq_core::{
    convergence_table, parse_function_spec, rl_integral_left, rl_integral_right, run_campaign,
    CampaignConfig, CampaignOutcome, ConvergenceRow, CorpusSpec, EvalOptions, FractionalEvaluation,
    FractionalSetup, HarnessOptions, InequalityReport, Interval, ModelFunction, Operator,
    TheoremId, Verdict,
};
use serde::Serialize;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

const GRAMMAR: &str = "\
FUNCTION SPECS (--f, --g):
  spec := term (\";\" term)*
  term := \"const:\" NUMBER | \"powb:c=\" NUMBER \",beta=\" NUMBER
  powb:c=C,beta=B denotes C*(b-t)^B. Whitespace is ignored; numbers may use
  scientific notation. Example: \"const:1;powb:c=-2,beta=2.5\"";

const EVAL_HELP: &str = "\
CSV COLUMNS: value,err_estimate,method
  method is closed_form or quadrature.";

const VERIFY_HELP: &str = "\
THEOREMS: CLASSICAL, Z1, Z2, Z3, A, A1, A2_STATED, A2_CORRECTED
  Z2 and A1 need alpha >= 1; Z3 and the A2 bounds need --p and
  alpha > 1 - 1/p. Combinations that fail these conditions are skipped and
  listed under summary.skipped.

CSV COLUMNS: theorem,alpha,m,p,q,a,b,x,function_ids,lhs,rhs,ratio,tol,verdict,error
  function_ids joins f and g with '|'. Empty cells mean 'not applicable'.

EXIT STATUS: 3 if any bound other than A2_STATED is VIOLATED.";

const CONVERGE_HELP: &str = "\
CSV COLUMNS: n_panels,value,abs_error_vs_oracle,empirical_order
  Rows for n_panels = 64, 128, 256, 512, 1024. empirical_order is
  log2(err(n/2)/err(n)) and is empty on the first row. The function must
  have a closed-form value for the chosen operator (exit 2 otherwise).";

#[derive(Debug, Parser)]
#[command(
    name = "fracineq",
    version,
    about = "Right Caputo fractional operators and Ostrowski-type bound verification",
    after_help = GRAMMAR,
    allow_negative_numbers = true
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate one operator at one point.
    #[command(after_help = format!("{EVAL_HELP}\n\n{GRAMMAR}"), allow_negative_numbers = true)]
    Eval(EvalArgs),
    /// Check inequalities on explicit functions or a seeded random corpus.
    #[command(after_help = format!("{VERIFY_HELP}\n\n{GRAMMAR}"), allow_negative_numbers = true)]
    Verify(VerifyArgs),
    /// Tabulate quadrature error against the closed-form value.
    #[command(after_help = format!("{CONVERGE_HELP}\n\n{GRAMMAR}"), allow_negative_numbers = true)]
    Converge(ConvergeArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OperatorArg {
    /// Left Riemann–Liouville integral J_{a+}^alpha.
    RlLeft,
    /// Right Riemann–Liouville integral J_{b-}^alpha.
    RlRight,
    /// Right Caputo derivative D_{b-}^alpha.
    CaputoRight,
    /// Right Caputo Taylor reconstruction of f(x).
    Taylor,
}

impl From<OperatorArg> for Operator {
    fn from(op: OperatorArg) -> Self {
        match op {
            OperatorArg::RlLeft => Operator::RlLeft,
            OperatorArg::RlRight => Operator::RlRight,
            OperatorArg::CaputoRight => Operator::CaputoRight,
            OperatorArg::Taylor => Operator::Taylor,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct IntervalArgs {
    /// Left end of the interval.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub a: f64,
    /// Right end of the interval.
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub b: f64,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Write output here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Panels per quadrature.
    #[arg(long = "grid-n", default_value_t = fracineq_core::DEFAULT_PANELS)]
    pub grid_n: usize,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(value_enum)]
    pub operator: OperatorArg,
    #[arg(long)]
    pub f: String,
    #[arg(long)]
    pub alpha: f64,
    /// Evaluation point [default: a].
    #[arg(long, allow_hyphen_values = true)]
    pub x: Option<f64>,
    #[command(flatten)]
    pub interval: IntervalArgs,
    /// Output format [default: csv].
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Comma-separated theorem list.
    #[arg(long, value_delimiter = ',', required = true, value_parser = parse_theorem)]
    pub theorems: Vec<TheoremId>,
    /// Comma-separated orders.
    #[arg(long, value_delimiter = ',', required = true)]
    pub alpha: Vec<f64>,
    /// Comma-separated Hölder exponents.
    #[arg(long, value_delimiter = ',')]
    pub p: Vec<f64>,
    /// Explicit f; replaces the random corpus.
    #[arg(long)]
    pub f: Option<String>,
    /// Partner function for the product bounds [default: f].
    #[arg(long, requires = "f")]
    pub g: Option<String>,
    /// Classical evaluation point with --f [default: random].
    #[arg(long, requires = "f", allow_hyphen_values = true)]
    pub x: Option<f64>,
    /// Random functions per order.
    #[arg(long, conflicts_with = "f", default_value_t = 20)]
    pub corpus: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Absolute slack added to every verdict tolerance. Negative values
    /// tighten verdicts, which exposes bounds that are nearly attained.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub tol: f64,
    #[command(flatten)]
    pub interval: IntervalArgs,
    /// Output format [default: json].
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ConvergeArgs {
    #[arg(value_enum)]
    pub operator: OperatorArg,
    #[arg(long)]
    pub f: String,
    #[arg(long)]
    pub alpha: f64,
    /// Evaluation point [default: a].
    #[arg(long, allow_hyphen_values = true)]
    pub x: Option<f64>,
    #[command(flatten)]
    pub interval: IntervalArgs,
    /// Output format [default: csv].
    #[command(flatten)]
    pub output: OutputArgs,
}

fn parse_theorem(s: &str) -> Result<TheoremId, String> {
    s.parse().map_err(|e: fracineq_core::Error| e.to_string())
}

/// Failure classes with their exit codes.
#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Invalid argument value; exit 2.
    Usage { flag: &'static str, message: String },
    /// Numerical evaluation failed; exit 1.
    Evaluation(String),
    /// Writing the output failed; exit 1.
    Io(String),
}

impl CliError {
    fn usage(flag: &'static str, message: impl ToString) -> Self {
        CliError::Usage {
            flag,
            message: message.to_string(),
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage { .. } => 2,
            CliError::Evaluation(_) | CliError::Io(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage { flag, message } => write!(f, "invalid {flag}: {message}"),
            CliError::Evaluation(m) => f.write_str(m),
            CliError::Io(m) => write!(f, "cannot write output: {m}"),
        }
    }
}

/// Runs a parsed command. `Ok` carries the exit code (0, or 3 after a
/// must-hold violation).
pub fn run(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::Eval(args) => cmd_eval(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Converge(args) => cmd_converge(args),
    }
}

fn interval(args: &IntervalArgs) -> Result<Interval, CliError> {
    Interval::new(args.a, args.b).map_err(|e| CliError::usage("--a/--b", e))
}

fn grid(out: &OutputArgs) -> Result<usize, CliError> {
    if out.grid_n < 2 {
        return Err(CliError::usage("--grid-n", "must be at least 2"));
    }
    Ok(out.grid_n)
}

fn function(flag: &'static str, text: &str, iv: Interval) -> Result<ModelFunction, CliError> {
    parse_function_spec(text, iv).map_err(|e| CliError::usage(flag, e))
}

fn point(x: Option<f64>, iv: Interval) -> Result<f64, CliError> {
    let x = x.unwrap_or(iv.a);
    if !iv.contains(x) {
        return Err(CliError::usage("--x", format!("{x} lies outside {iv}")));
    }
    Ok(x)
}

fn emit(out: &OutputArgs, text: &str) -> Result<(), CliError> {
    match &out.out {
        Some(path) => {
            fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
        }
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(e.to_string())),
    }
}

fn to_json<T: Serialize>(doc: &T) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("report types serialize");
    s.push('\n');
    s
}

/// 17 significant digits.
fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn opt_num(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_owned()
    }
}

#[derive(Serialize)]
struct EvalMeta<'a> {
    version: &'a str,
    command: &'a str,
    operator: Operator,
    f: &'a str,
    interval: Interval,
    alpha: f64,
    x: f64,
    grid_n: usize,
}

#[derive(Serialize)]
struct EvalDoc<'a> {
    meta: EvalMeta<'a>,
    result: FractionalEvaluation,
}

fn cmd_eval(args: EvalArgs) -> Result<u8, CliError> {
    let iv = interval(&args.interval)?;
    let n = grid(&args.output)?;
    let f = function("--f", &args.f, iv)?;
    let x = point(args.x, iv)?;
    let opts = EvalOptions {
        n_panels: n,
        prefer_closed_form: true,
    };
    let op = Operator::from(args.operator);
    let result = match op {
        // Order zero is allowed for the integrals.
        Operator::RlLeft | Operator::RlRight => {
            if !(args.alpha >= 0.0 && args.alpha.is_finite()) {
                return Err(CliError::usage("--alpha", "must be nonnegative and finite"));
            }
            if op == Operator::RlLeft {
                rl_integral_left(&f, args.alpha, x, &opts)
            } else {
                rl_integral_right(&f, args.alpha, x, &opts)
            }
        }
        _ => {
            let setup =
                FractionalSetup::new(args.alpha).map_err(|e| CliError::usage("--alpha", e))?;
            op.evaluate(&f, &setup, x, &opts)
        }
    }
    .map_err(|e| CliError::Evaluation(e.to_string()))?;

    let text = match args.output.format.unwrap_or(Format::Csv) {
        Format::Csv => format!(
            "value,err_estimate,method\n{},{},{}\n",
            num(result.value),
            num(result.err_estimate),
            result.method.as_str()
        ),
        Format::Json => to_json(&EvalDoc {
            meta: EvalMeta {
                version: VERSION,
                command: "eval",
                operator: op,
                f: f.id(),
                interval: iv,
                alpha: args.alpha,
                x,
                grid_n: n,
            },
            result,
        }),
    };
    emit(&args.output, &text)?;
    Ok(0)
}

#[derive(Serialize)]
struct VerifyMeta<'a> {
    version: &'a str,
    command: &'a str,
    seed: u64,
    interval: Interval,
    theorems: &'a [TheoremId],
    alphas: &'a [f64],
    #[serde(skip_serializing_if = "<[f64]>::is_empty")]
    ps: &'a [f64],
    #[serde(skip_serializing_if = "Option::is_none")]
    corpus: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    f: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    g: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    x: Option<f64>,
    grid_n: usize,
    tol: f64,
}

#[derive(Serialize)]
struct VerifyDoc<'a> {
    meta: VerifyMeta<'a>,
    #[serde(flatten)]
    outcome: &'a CampaignOutcome,
}

fn verify_csv(reports: &[InequalityReport]) -> String {
    let mut s =
        String::from("theorem,alpha,m,p,q,a,b,x,function_ids,lhs,rhs,ratio,tol,verdict,error\n");
    for r in reports {
        let verdict = match r.verdict {
            Verdict::Holds => "HOLDS",
            Verdict::Violated => "VIOLATED",
            Verdict::Inconclusive => "INCONCLUSIVE",
        };
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.theorem,
            num(r.setup.alpha),
            r.setup.m,
            opt_num(r.setup.p),
            opt_num(r.setup.q),
            num(r.iv.a),
            num(r.iv.b),
            opt_num(r.x),
            csv_field(&r.function_ids.join("|")),
            num(r.lhs),
            num(r.rhs),
            opt_num(r.ratio),
            num(r.tol),
            verdict,
            csv_field(r.error.as_deref().unwrap_or("")),
        );
    }
    s
}

fn cmd_verify(args: VerifyArgs) -> Result<u8, CliError> {
    let iv = interval(&args.interval)?;
    let n = grid(&args.output)?;
    for &alpha in &args.alpha {
        FractionalSetup::new(alpha).map_err(|e| CliError::usage("--alpha", e))?;
    }
    for &p in &args.p {
        if !(p > 1.0 && p.is_finite()) {
            return Err(CliError::usage(
                "--p",
                format!("exponent must exceed 1, got {p}"),
            ));
        }
    }
    if let Some(t) = args.theorems.iter().find(|t| t.needs_holder()) {
        if args.p.is_empty() {
            return Err(CliError::usage("--p", format!("required by {t}")));
        }
    }
    if !args.tol.is_finite() {
        return Err(CliError::usage("--tol", "must be finite"));
    }
    let corpus = match &args.f {
        Some(text) => {
            let f = function("--f", text, iv)?;
            let g = match &args.g {
                Some(t) => function("--g", t, iv)?,
                None => f.clone(),
            };
            let x = args.x.map(|x| point(Some(x), iv)).transpose()?;
            CorpusSpec::Fixed { f, g, x }
        }
        None => {
            if args.corpus == 0 {
                return Err(CliError::usage("--corpus", "must be at least 1"));
            }
            CorpusSpec::Random { size: args.corpus }
        }
    };
    let config = CampaignConfig {
        iv,
        alphas: args.alpha.clone(),
        ps: args.p.clone(),
        theorems: args.theorems.clone(),
        corpus,
        seed: args.seed,
        opts: HarnessOptions {
            eval: EvalOptions {
                n_panels: n,
                prefer_closed_form: true,
            },
            extra_tol: args.tol,
        },
    };
    let outcome = run_campaign(&config).map_err(|e| CliError::Evaluation(e.to_string()))?;

    let text = match args.output.format.unwrap_or(Format::Json) {
        Format::Csv => verify_csv(&outcome.reports),
        Format::Json => to_json(&VerifyDoc {
            meta: VerifyMeta {
                version: VERSION,
                command: "verify",
                seed: args.seed,
                interval: iv,
                theorems: &args.theorems,
                alphas: &args.alpha,
                ps: &args.p,
                corpus: args.f.is_none().then_some(args.corpus),
                f: args.f.as_deref(),
                g: args.g.as_deref(),
                x: args.x,
                grid_n: n,
                tol: args.tol,
            },
            outcome: &outcome,
        }),
    };
    emit(&args.output, &text)?;
    eprint!("{}", summary_text(&outcome));
    Ok(if outcome.summary.violations > 0 { 3 } else { 0 })
}

/// Human-readable digest written to stderr after `verify`.
pub fn summary_text(outcome: &CampaignOutcome) -> String {
    let mut s = String::new();
    for (t, sum) in &outcome.summary.theorems {
        let _ = writeln!(
            s,
            "{t:<13} count={} holds={} violated={} inconclusive={} errors={} max_ratio={}",
            sum.count,
            sum.holds,
            sum.violated,
            sum.inconclusive,
            sum.errors,
            sum.max_ratio.map_or("-".to_owned(), |r| format!("{r:.6}")),
        );
    }
    if !outcome.summary.a2_pairs.is_empty() {
        let (lo, hi) = outcome
            .summary
            .a2_pairs
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
                (lo.min(p.ratio), hi.max(p.ratio))
            });
        let _ = writeln!(
            s,
            "A2 stated/corrected rhs ratio over {} pairs: [{lo:.12}, {hi:.12}]; A2_STATED violations: {}",
            outcome.summary.a2_pairs.len(),
            outcome.summary.a2_stated_violations
        );
    }
    for skip in &outcome.summary.skipped {
        let _ = writeln!(s, "skipped: {skip}");
    }
    let _ = writeln!(s, "violations: {}", outcome.summary.violations);
    s
}

const CONVERGE_PANELS: [usize; 5] = [64, 128, 256, 512, 1024];

#[derive(Serialize)]
struct ConvergeMeta<'a> {
    version: &'a str,
    command: &'a str,
    operator: Operator,
    f: &'a str,
    interval: Interval,
    alpha: f64,
    x: f64,
}

#[derive(Serialize)]
struct ConvergeDoc<'a> {
    meta: ConvergeMeta<'a>,
    rows: &'a [ConvergenceRow],
}

fn cmd_converge(args: ConvergeArgs) -> Result<u8, CliError> {
    let iv = interval(&args.interval)?;
    let f = function("--f", &args.f, iv)?;
    let x = point(args.x, iv)?;
    let setup = FractionalSetup::new(args.alpha).map_err(|e| CliError::usage("--alpha", e))?;
    let op = Operator::from(args.operator);
    op.oracle(&f, &setup, x)
        .map_err(|e| CliError::usage("--f", format!("no closed-form reference: {e}")))?;
    let rows = convergence_table(op, &f, &setup, x, &CONVERGE_PANELS)
        .map_err(|e| CliError::Evaluation(e.to_string()))?;

    let text = match args.output.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut s = String::from("n_panels,value,abs_error_vs_oracle,empirical_order\n");
            for r in &rows {
                let _ = writeln!(
                    s,
                    "{},{},{},{}",
                    r.n_panels,
                    num(r.value),
                    num(r.abs_error_vs_oracle),
                    opt_num(r.empirical_order)
                );
            }
            s
        }
        Format::Json => to_json(&ConvergeDoc {
            meta: ConvergeMeta {
                version: VERSION,
                command: "converge",
                operator: op,
                f: f.id(),
                interval: iv,
                alpha: args.alpha,
                x,
            },
            rows: &rows,
        }),
    };
    emit(&args.output, &text)?;
    Ok(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_keep_seventeen_digits() {
        let v = 0.1 + 0.2;
        assert_eq!(num(v).parse::<f64>().unwrap(), v);
        assert_eq!(num(1.0), "1.0000000000000000e0");
        assert_eq!(opt_num(None), "");
    }

    #[test]
    fn csv_quoting() {
        assert_eq!(csv_field("const:1"), "const:1");
        assert_eq!(csv_field("powb:c=1,beta=2"), "\"powb:c=1,beta=2\"");
        assert_eq!(csv_field("say \"hi\", ok"), "\"say \"\"hi\"\", ok\"");
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn usage_errors_name_the_flag() {
        let e = CliError::usage("--alpha", "must be positive");
        assert_eq!(e.exit_code(), 2);
        assert!(e.to_string().contains("--alpha"));
        assert_eq!(CliError::Evaluation("x".into()).exit_code(), 1);
        assert_eq!(
            CliError::Evaluation("evaluation failed: inf".into()).to_string(),
            "evaluation failed: inf"
        );
    }
}
