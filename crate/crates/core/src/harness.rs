//! Left- and right-hand sides of the Ostrowski-type bounds, verdicts with
//! propagated numerical tolerances, and seeded verification campaigns.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::fractional::{rl_left_abs_at_b, CaputoProfile, EvalOptions, FractionalEvaluation};
use crate::model::{sample_corpus, FractionalSetup, Interval, ModelFunction};
use crate::quadrature::{graded_integral, norm, NormKind, QuadResult};
use crate::special::gamma_unchecked;

/// Multiplier applied to summed error estimates when forming a tolerance.
const ERR_INFLATION: f64 = 3.0;
/// Relative floor of the tolerance, in units of the largest of |lhs|, |rhs|
/// and the magnitude of the terms cancelled inside lhs.
const REL_FLOOR: f64 = 1e-12;
/// `|f^(k)(b)|` at or below this counts as vanishing.
const BOUNDARY_ZERO: f64 = 1e-12;

/// The inequalities under test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TheoremId {
    /// Classical Ostrowski inequality with `‖f′‖_∞`.
    #[serde(rename = "CLASSICAL")]
    Classical,
    /// Point-at-b bound with `‖D_{b−}^α f‖_∞`.
    Z1,
    /// Point-at-b bound with `‖D_{b−}^α f‖_{L¹}`, α ≥ 1.
    Z2,
    /// Point-at-b bound with `‖D_{b−}^α f‖_{L^q}`.
    Z3,
    /// Product bound, L^∞ case.
    A,
    /// Product bound, L¹ case, α ≥ 1.
    A1,
    /// Product bound, L^q case, as printed.
    #[serde(rename = "A2_STATED")]
    A2Stated,
    /// Product bound, L^q case, with the Hölder constant carried through.
    #[serde(rename = "A2_CORRECTED")]
    A2Corrected,
}

impl TheoremId {
    pub const ALL: [TheoremId; 8] = [
        TheoremId::Classical,
        TheoremId::Z1,
        TheoremId::Z2,
        TheoremId::Z3,
        TheoremId::A,
        TheoremId::A1,
        TheoremId::A2Stated,
        TheoremId::A2Corrected,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TheoremId::Classical => "CLASSICAL",
            TheoremId::Z1 => "Z1",
            TheoremId::Z2 => "Z2",
            TheoremId::Z3 => "Z3",
            TheoremId::A => "A",
            TheoremId::A1 => "A1",
            TheoremId::A2Stated => "A2_STATED",
            TheoremId::A2Corrected => "A2_CORRECTED",
        }
    }

    pub fn needs_holder(self) -> bool {
        matches!(
            self,
            TheoremId::Z3 | TheoremId::A2Stated | TheoremId::A2Corrected
        )
    }

    pub fn needs_alpha_at_least_one(self) -> bool {
        matches!(self, TheoremId::Z2 | TheoremId::A1)
    }

    pub fn is_product(self) -> bool {
        matches!(
            self,
            TheoremId::A | TheoremId::A1 | TheoremId::A2Stated | TheoremId::A2Corrected
        )
    }

    /// Violations of these bounds count as failures; `A2_STATED` is only
    /// reported.
    pub fn must_hold(self) -> bool {
        self != TheoremId::A2Stated
    }

    /// Checks the order/exponent conditions attached to the theorem.
    pub fn check_setup(self, setup: &FractionalSetup) -> Result<()> {
        if self.needs_alpha_at_least_one() && setup.alpha < 1.0 {
            return Err(Error::Hypothesis(format!(
                "{} requires alpha >= 1, got {}",
                self, setup.alpha
            )));
        }
        if self.needs_holder() {
            let (p, _) = setup.holder()?;
            if setup.alpha <= 1.0 - 1.0 / p {
                return Err(Error::Hypothesis(format!(
                    "{} requires alpha > 1 - 1/p, got alpha = {}, p = {p}",
                    self, setup.alpha
                )));
            }
        }
        Ok(())
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TheoremId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TheoremId::ALL
            .into_iter()
            .find(|t| t.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Parse(format!("unknown theorem {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Holds,
    Violated,
    Inconclusive,
}

impl Verdict {
    /// `VIOLATED` when `lhs > rhs + tol`; otherwise `INCONCLUSIVE` when the
    /// bound itself is within tolerance of zero, else `HOLDS`.
    pub fn decide(lhs: f64, rhs: f64, tol: f64) -> Self {
        if lhs > rhs + tol {
            Verdict::Violated
        } else if rhs <= tol {
            Verdict::Inconclusive
        } else {
            Verdict::Holds
        }
    }
}

/// One evaluated inequality instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub theorem: TheoremId,
    pub setup: FractionalSetup,
    pub iv: Interval,
    pub function_ids: Vec<String>,
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs / rhs`, present when `rhs > 0`.
    pub ratio: Option<f64>,
    pub tol: f64,
    pub verdict: Verdict,
    /// Evaluation point of the classical inequality.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<f64>,
    /// Set when the instance could not be evaluated.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Numerical settings shared by all evaluations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HarnessOptions {
    pub eval: EvalOptions,
    /// Absolute slack added to every tolerance.
    pub extra_tol: f64,
}

impl Default for HarnessOptions {
    fn default() -> Self {
        Self {
            eval: EvalOptions::default(),
            extra_tol: 0.0,
        }
    }
}

/// Value with an absolute error estimate, for propagating through products.
#[derive(Debug, Clone, Copy)]
struct Approx {
    value: f64,
    err: f64,
}

impl Approx {
    fn scale(self, k: f64) -> Self {
        Self {
            value: k * self.value,
            err: k.abs() * self.err,
        }
    }

    fn mul(self, o: Self) -> Self {
        Self {
            value: self.value * o.value,
            err: self.value.abs() * o.err + o.value.abs() * self.err + self.err * o.err,
        }
    }

    fn add(self, o: Self) -> Self {
        Self {
            value: self.value + o.value,
            err: self.err + o.err,
        }
    }
}

impl From<QuadResult> for Approx {
    fn from(q: QuadResult) -> Self {
        Self {
            value: q.value,
            err: q.err_estimate,
        }
    }
}

impl From<FractionalEvaluation> for Approx {
    fn from(e: FractionalEvaluation) -> Self {
        Self {
            value: e.value,
            err: e.err_estimate,
        }
    }
}

fn build_report(
    theorem: TheoremId,
    setup: FractionalSetup,
    iv: Interval,
    function_ids: Vec<String>,
    lhs: Approx,
    rhs: Approx,
    cancelled: f64,
    opts: &HarnessOptions,
) -> InequalityReport {
    let (l, r) = (lhs.value, rhs.value);
    let tol = ERR_INFLATION * (lhs.err + rhs.err)
        + REL_FLOOR * l.abs().max(r.abs()).max(cancelled)
        + opts.extra_tol;
    InequalityReport {
        theorem,
        setup,
        iv,
        function_ids,
        lhs: l,
        rhs: r,
        ratio: (r > 0.0).then(|| l / r),
        tol,
        verdict: Verdict::decide(l, r, tol),
        x: None,
        error: None,
    }
}

/// `(1/(b−a))∫_a^b f`.
fn mean_value(f: &ModelFunction, opts: &HarnessOptions) -> Result<Approx> {
    let iv = f.interval();
    let q = graded_integral(|t| f.eval(t), iv.a, iv.b, opts.eval.n_panels)?;
    Ok(Approx::from(q).scale(1.0 / iv.len()))
}

/// Norm of `D_{b−}^α f` over the interval, including the pointwise error of
/// the Caputo values when they come from quadrature.
fn caputo_norm(
    f: &ModelFunction,
    setup: &FractionalSetup,
    kind: NormKind,
    opts: &HarnessOptions,
) -> Result<Approx> {
    let iv = f.interval();
    let profile = CaputoProfile::new(f, setup, &opts.eval)?;
    let n = norm(|t| profile.at(t), iv, kind, opts.eval.n_panels);
    let (q, inner) = profile.finish(n)?;
    // A pointwise perturbation of size e moves the norm by at most e·‖1‖.
    let lift = match kind {
        NormKind::Linf => 1.0,
        NormKind::L1 => iv.len(),
        NormKind::Lq(q) => iv.len().powf(1.0 / q),
    };
    Ok(Approx {
        value: q.value,
        err: q.err_estimate + inner * lift,
    })
}

fn check_vanishing_derivatives(f: &ModelFunction, setup: &FractionalSetup) -> Result<()> {
    f.check_order(setup.m)
        .map_err(|e| Error::Hypothesis(e.to_string()))?;
    for k in 1..setup.m {
        let v = f.boundary(k)?;
        if !(v.abs() <= BOUNDARY_ZERO) {
            return Err(Error::Hypothesis(format!(
                "{}: f^({k})(b) = {v} but must vanish for k = 1..m-1",
                f.id()
            )));
        }
    }
    Ok(())
}

/// Classical Ostrowski inequality at `x`:
/// `|f(x) − mean f| ≤ (b−a)[1/4 + (x−(a+b)/2)²/(b−a)²]‖f′‖_∞`.
pub fn eval_classical_ostrowski(
    f: &ModelFunction,
    x: f64,
    opts: &HarnessOptions,
) -> Result<InequalityReport> {
    let iv = f.interval();
    f.check_order(1)?;
    if !iv.contains(x) {
        return Err(domain(format!("point x = {x} lies outside {iv}")));
    }
    let mean = mean_value(f, opts)?;
    let fx = f.eval(x);
    let lhs = Approx {
        value: (fx - mean.value).abs(),
        err: mean.err,
    };
    let sup = norm(
        |t| f.deriv_raw(1, t),
        iv,
        NormKind::Linf,
        opts.eval.n_panels,
    )?;
    let len = iv.len();
    let offset = (x - iv.midpoint()) / len;
    let rhs = Approx::from(sup).scale(len * (0.25 + offset * offset));
    // Order 1 is nominal; campaigns overwrite it with their own setup.
    let setup = FractionalSetup::new(1.0)?;
    let mut report = build_report(
        TheoremId::Classical,
        setup,
        iv,
        vec![f.id().to_owned()],
        lhs,
        rhs,
        fx.abs() + mean.value.abs(),
        opts,
    );
    report.x = Some(x);
    Ok(report)
}

/// Bounds on `|f(b) − mean f|` in terms of a norm of `D_{b−}^α f`.
pub fn eval_z_bound(
    f: &ModelFunction,
    setup: &FractionalSetup,
    which: TheoremId,
    opts: &HarnessOptions,
) -> Result<InequalityReport> {
    if !matches!(which, TheoremId::Z1 | TheoremId::Z2 | TheoremId::Z3) {
        return Err(domain(format!("{which} is not a point-at-b bound")));
    }
    which.check_setup(setup)?;
    check_vanishing_derivatives(f, setup)?;
    let iv = f.interval();
    let len = iv.len();
    let alpha = setup.alpha;
    let mean = mean_value(f, opts)?;
    let fb = f.boundary(0)?;
    let lhs = Approx {
        value: (fb - mean.value).abs(),
        err: mean.err,
    };
    let rhs = match which {
        TheoremId::Z1 => caputo_norm(f, setup, NormKind::Linf, opts)?
            .scale(len.powf(alpha) / gamma_unchecked(alpha + 2.0)),
        TheoremId::Z2 => caputo_norm(f, setup, NormKind::L1, opts)?
            .scale(len.powf(alpha - 1.0) / gamma_unchecked(alpha + 1.0)),
        _ => {
            let (p, q) = setup.holder()?;
            let denom = gamma_unchecked(alpha)
                * (p * (alpha - 1.0) + 1.0).powf(1.0 / p)
                * (alpha + 1.0 / p);
            caputo_norm(f, setup, NormKind::Lq(q), opts)?
                .scale(len.powf(alpha - 1.0 + 1.0 / p) / denom)
        }
    };
    Ok(build_report(
        which,
        *setup,
        iv,
        vec![f.id().to_owned()],
        lhs,
        rhs,
        fb.abs() + mean.value.abs(),
        opts,
    ))
}

/// `Γ(α)·(p(α−1)+1)^(1/p)`: the factor by which the printed L^q product bound
/// exceeds the bound its Hölder step produces.
pub fn a2_discrepancy_factor(alpha: f64, p: f64) -> f64 {
    gamma_unchecked(alpha) * (p * (alpha - 1.0) + 1.0).powf(1.0 / p)
}

/// Product bounds on `|2∫fg − ∫(f·g(b) + g·f(b))|`.
///
/// `J_{a+}^s|g(b)|` is evaluated as `(J_{a+}^s|g|)(b)`.
pub fn eval_product_theorem(
    f: &ModelFunction,
    g: &ModelFunction,
    setup: &FractionalSetup,
    which: TheoremId,
    opts: &HarnessOptions,
) -> Result<InequalityReport> {
    if !which.is_product() {
        return Err(domain(format!("{which} is not a product bound")));
    }
    let iv = f.interval();
    if g.interval() != iv {
        return Err(domain(format!(
            "f and g live on different intervals {} and {}",
            iv,
            g.interval()
        )));
    }
    which.check_setup(setup)?;
    check_vanishing_derivatives(f, setup)?;
    check_vanishing_derivatives(g, setup)?;

    let (fb, gb) = (f.boundary(0)?, g.boundary(0)?);
    let lhs_int = graded_integral(
        |x| {
            let (fx, gx) = (f.eval(x), g.eval(x));
            2.0 * fx * gx - (fx * gb + gx * fb)
        },
        iv.a,
        iv.b,
        opts.eval.n_panels,
    )?;
    let lhs = Approx {
        value: lhs_int.value.abs(),
        err: lhs_int.err_estimate,
    };
    let cancelled = graded_integral(
        |x| {
            let (fx, gx) = (f.eval(x), g.eval(x));
            (2.0 * fx * gx).abs() + (fx * gb).abs() + (gx * fb).abs()
        },
        iv.a,
        iv.b,
        opts.eval.n_panels,
    )?
    .value;

    let alpha = setup.alpha;
    let (kind, order) = match which {
        TheoremId::A => (NormKind::Linf, alpha + 1.0),
        TheoremId::A1 => (NormKind::L1, alpha),
        _ => {
            let (p, q) = setup.holder()?;
            (NormKind::Lq(q), alpha + 1.0 / p)
        }
    };
    let nf = caputo_norm(f, setup, kind, opts)?;
    let ng = caputo_norm(g, setup, kind, opts)?;
    let jf = Approx::from(rl_left_abs_at_b(f, order, &opts.eval)?);
    let jg = Approx::from(rl_left_abs_at_b(g, order, &opts.eval)?);
    let core = nf.mul(jg).add(ng.mul(jf));
    let rhs = match which {
        TheoremId::A | TheoremId::A1 => core,
        TheoremId::A2Stated => core.scale(gamma_unchecked(order)),
        _ => {
            let (p, _) = setup.holder()?;
            core.scale(gamma_unchecked(order) / a2_discrepancy_factor(alpha, p))
        }
    };
    Ok(build_report(
        which,
        *setup,
        iv,
        vec![f.id().to_owned(), g.id().to_owned()],
        lhs,
        rhs,
        cancelled,
        opts,
    ))
}

/// Functions fed to a campaign.
#[derive(Debug, Clone)]
pub enum CorpusSpec {
    /// `size` random functions per order (and an independent partner list
    /// for the product bounds).
    Random { size: usize },
    /// One explicit `f` and `g`; `x` fixes the classical evaluation point.
    Fixed {
        f: ModelFunction,
        g: ModelFunction,
        x: Option<f64>,
    },
}

#[derive(Debug, Clone)]
pub struct CampaignConfig {
    pub iv: Interval,
    pub alphas: Vec<f64>,
    /// Hölder exponents; theorems that need one run once per `p`.
    pub ps: Vec<f64>,
    pub theorems: Vec<TheoremId>,
    pub corpus: CorpusSpec,
    pub seed: u64,
    pub opts: HarnessOptions,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TheoremSummary {
    pub count: usize,
    pub holds: usize,
    pub violated: usize,
    pub inconclusive: usize,
    pub errors: usize,
    pub max_ratio: Option<f64>,
}

/// Stated versus corrected L^q product bound for one `(f, g, α, p)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct A2Pair {
    pub alpha: f64,
    pub p: f64,
    pub function_ids: Vec<String>,
    pub lhs: f64,
    pub stated_rhs: f64,
    pub corrected_rhs: f64,
    /// `stated_rhs / corrected_rhs`; equals `Γ(α)(p(α−1)+1)^(1/p)`.
    pub ratio: f64,
    pub stated_violated: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CampaignSummary {
    pub theorems: BTreeMap<TheoremId, TheoremSummary>,
    /// Violations among the bounds that must hold.
    pub violations: usize,
    /// `A2_STATED` violations (reported, never fatal).
    pub a2_stated_violations: usize,
    pub a2_pairs: Vec<A2Pair>,
    /// Configurations left out because the theorem's order or exponent
    /// conditions fail, e.g. `Z2 alpha=0.5`.
    pub skipped: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignOutcome {
    pub reports: Vec<InequalityReport>,
    pub summary: CampaignSummary,
}

struct Task {
    theorem: TheoremId,
    setup: FractionalSetup,
    pair: usize,
    x: f64,
}

/// Stream-separated seed for a sub-generator.
fn subseed(seed: u64, stream: u64, index: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng.set_word_pos(u128::from(index) * 16);
    rng.random()
}

/// Evaluates every `(order [, p]) × function × theorem` combination.
///
/// Reports come back in input order (orders, then theorems, then exponents,
/// then functions) regardless of how the work is scheduled. Evaluation
/// failures are recorded in the report's `error` field.
pub fn run_campaign(config: &CampaignConfig) -> Result<CampaignOutcome> {
    let mut summary = CampaignSummary::default();
    if config.theorems.is_empty() {
        return Ok(CampaignOutcome {
            reports: Vec::new(),
            summary,
        });
    }
    let iv = config.iv;
    let mut corpora: Vec<(Vec<ModelFunction>, Vec<ModelFunction>)> = Vec::new();
    let mut tasks: Vec<(usize, Task)> = Vec::new();
    for (ai, &alpha) in config.alphas.iter().enumerate() {
        let base = FractionalSetup::new(alpha)?;
        let (fs, gs) = match &config.corpus {
            CorpusSpec::Random { size } => (
                sample_corpus(&base, iv, *size, subseed(config.seed, 1, ai as u64))?,
                sample_corpus(&base, iv, *size, subseed(config.seed, 2, ai as u64))?,
            ),
            CorpusSpec::Fixed { f, g, .. } => (vec![f.clone()], vec![g.clone()]),
        };
        let mut xrng = ChaCha8Rng::seed_from_u64(subseed(config.seed, 3, ai as u64));
        let xs: Vec<f64> = match &config.corpus {
            CorpusSpec::Fixed { x: Some(x), .. } => vec![*x],
            _ => (0..fs.len())
                .map(|_| xrng.random_range(iv.a..=iv.b))
                .collect(),
        };
        for &theorem in &config.theorems {
            let setups: Vec<FractionalSetup> = if theorem.needs_holder() {
                if config.ps.is_empty() {
                    summary
                        .skipped
                        .push(format!("{theorem} alpha={alpha}: no p given"));
                }
                config
                    .ps
                    .iter()
                    .filter_map(|&p| match FractionalSetup::with_holder(alpha, p) {
                        Ok(s) => Some(s),
                        Err(e) => {
                            summary
                                .skipped
                                .push(format!("{theorem} alpha={alpha} p={p}: {e}"));
                            None
                        }
                    })
                    .collect()
            } else {
                vec![base]
            };
            for setup in setups {
                if let Err(e) = theorem.check_setup(&setup) {
                    summary
                        .skipped
                        .push(format!("{theorem} alpha={alpha}: {e}"));
                    continue;
                }
                for (i, &x) in xs.iter().enumerate() {
                    tasks.push((
                        corpora.len(),
                        Task {
                            theorem,
                            setup,
                            pair: i,
                            x,
                        },
                    ));
                }
            }
        }
        corpora.push((fs, gs));
    }

    let opts = config.opts;
    let reports: Vec<InequalityReport> = tasks
        .par_iter()
        .map(|(ci, task)| {
            let (fs, gs) = &corpora[*ci];
            let (f, g) = (&fs[task.pair], &gs[task.pair]);
            let outcome = match task.theorem {
                TheoremId::Classical => {
                    eval_classical_ostrowski(f, task.x, &opts).map(|r| InequalityReport {
                        setup: task.setup,
                        ..r
                    })
                }
                TheoremId::Z1 | TheoremId::Z2 | TheoremId::Z3 => {
                    eval_z_bound(f, &task.setup, task.theorem, &opts)
                }
                _ => eval_product_theorem(f, g, &task.setup, task.theorem, &opts),
            };
            outcome.unwrap_or_else(|e| {
                let ids = if task.theorem.is_product() {
                    vec![f.id().to_owned(), g.id().to_owned()]
                } else {
                    vec![f.id().to_owned()]
                };
                InequalityReport {
                    theorem: task.theorem,
                    setup: task.setup,
                    iv,
                    function_ids: ids,
                    lhs: 0.0,
                    rhs: 0.0,
                    ratio: None,
                    tol: 0.0,
                    verdict: Verdict::Inconclusive,
                    x: (task.theorem == TheoremId::Classical).then_some(task.x),
                    error: Some(e.to_string()),
                }
            })
        })
        .collect();

    summarize(&reports, &mut summary);
    Ok(CampaignOutcome { reports, summary })
}

fn summarize(reports: &[InequalityReport], summary: &mut CampaignSummary) {
    for r in reports {
        let entry = summary.theorems.entry(r.theorem).or_default();
        entry.count += 1;
        if r.error.is_some() {
            entry.errors += 1;
            continue;
        }
        match r.verdict {
            Verdict::Holds => entry.holds += 1,
            Verdict::Violated => {
                entry.violated += 1;
                if r.theorem.must_hold() {
                    summary.violations += 1;
                } else {
                    summary.a2_stated_violations += 1;
                }
            }
            Verdict::Inconclusive => entry.inconclusive += 1,
        }
        if let Some(ratio) = r.ratio {
            entry.max_ratio = Some(entry.max_ratio.map_or(ratio, |m: f64| m.max(ratio)));
        }
    }

    // Pair stated/corrected reports that share setup and functions.
    let corrected: BTreeMap<(u64, u64, &[String]), &InequalityReport> = reports
        .iter()
        .filter(|r| r.theorem == TheoremId::A2Corrected && r.error.is_none())
        .map(|r| {
            (
                (
                    r.setup.alpha.to_bits(),
                    r.setup.p.unwrap_or(0.0).to_bits(),
                    r.function_ids.as_slice(),
                ),
                r,
            )
        })
        .collect();
    for stated in reports
        .iter()
        .filter(|r| r.theorem == TheoremId::A2Stated && r.error.is_none())
    {
        let key = (
            stated.setup.alpha.to_bits(),
            stated.setup.p.unwrap_or(0.0).to_bits(),
            stated.function_ids.as_slice(),
        );
        if let Some(corr) = corrected.get(&key) {
            summary.a2_pairs.push(A2Pair {
                alpha: stated.setup.alpha,
                p: stated.setup.p.unwrap_or(f64::NAN),
                function_ids: stated.function_ids.clone(),
                lhs: stated.lhs,
                stated_rhs: stated.rhs,
                corrected_rhs: corr.rhs,
                ratio: stated.rhs / corr.rhs,
                stated_violated: stated.verdict == Verdict::Violated,
            });
        }
    }
}
