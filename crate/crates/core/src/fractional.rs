//! Riemann–Liouville integrals, the right Caputo derivative and the right
//! Caputo Taylor reconstruction.
//!
//! Every operator has two routes. Functions built from constants and
//! `c·(b−t)^β` terms admit exact closed forms (Beta-integral identities);
//! anything else, or any evaluation with `prefer_closed_form = false`, goes
//! through product integration in [`crate::quadrature`].

use std::cell::{Cell, RefCell};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::model::{FractionalSetup, Interval, ModelFunction, Term};
use crate::quadrature::{singular_integral, QuadResult, DEFAULT_PANELS};
use crate::special::gamma_unchecked;

/// How a value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Quadrature,
    ClosedForm,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Quadrature => "quadrature",
            Method::ClosedForm => "closed_form",
        }
    }
}

/// Operator value with its absolute error estimate. Closed-form values carry
/// a zero estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FractionalEvaluation {
    pub value: f64,
    pub err_estimate: f64,
    pub method: Method,
}

impl FractionalEvaluation {
    fn closed(value: f64) -> Self {
        Self {
            value,
            err_estimate: 0.0,
            method: Method::ClosedForm,
        }
    }

    fn quadrature(q: QuadResult, scale: f64) -> Self {
        Self {
            value: scale * q.value,
            err_estimate: scale.abs() * q.err_estimate,
            method: Method::Quadrature,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalOptions {
    pub n_panels: usize,
    /// Use exact closed forms whenever the function's oracle class allows.
    pub prefer_closed_form: bool,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self {
            n_panels: DEFAULT_PANELS,
            prefer_closed_form: true,
        }
    }
}

impl EvalOptions {
    pub fn quadrature_only(n_panels: usize) -> Self {
        Self {
            n_panels,
            prefer_closed_form: false,
        }
    }
}

fn check_point(iv: Interval, x: f64) -> Result<()> {
    if iv.contains(x) {
        Ok(())
    } else {
        Err(domain(format!("point x = {x} lies outside {iv}")))
    }
}

fn check_order(alpha: f64) -> Result<()> {
    if alpha >= 0.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(domain(format!(
            "order must be nonnegative and finite, got {alpha}"
        )))
    }
}

/// `∫_a^x (x−t)^(α−1) φ(t) dt / Γ(α)` by product integration, for α > 0 and
/// `a < x`.
pub fn rl_left_of(
    phi: impl Fn(f64) -> f64,
    a: f64,
    alpha: f64,
    x: f64,
    n_panels: usize,
) -> Result<QuadResult> {
    // u = x − t moves the kernel singularity to the lower limit.
    let q = singular_integral(|u| phi(x - u), 0.0, x - a, alpha, n_panels)?;
    let g = gamma_unchecked(alpha);
    Ok(QuadResult {
        value: q.value / g,
        err_estimate: q.err_estimate / g,
    })
}

/// `∫_x^b (t−x)^(α−1) φ(t) dt / Γ(α)` by product integration, for α > 0 and
/// `x < b`.
pub fn rl_right_of(
    phi: impl Fn(f64) -> f64,
    b: f64,
    alpha: f64,
    x: f64,
    n_panels: usize,
) -> Result<QuadResult> {
    let q = singular_integral(phi, x, b, alpha, n_panels)?;
    let g = gamma_unchecked(alpha);
    Ok(QuadResult {
        value: q.value / g,
        err_estimate: q.err_estimate / g,
    })
}

fn sum_terms(terms: &[Term], mut each: impl FnMut(&Term) -> Option<f64>) -> Option<f64> {
    terms.iter().map(&mut each).sum()
}

/// Left Riemann–Liouville integral `J_{a+}^α f(x)`. Order zero is the identity.
pub fn rl_integral_left(
    f: &ModelFunction,
    alpha: f64,
    x: f64,
    opts: &EvalOptions,
) -> Result<FractionalEvaluation> {
    check_order(alpha)?;
    let iv = f.interval();
    check_point(iv, x)?;
    if alpha == 0.0 {
        return Ok(FractionalEvaluation::closed(f.eval(x)));
    }
    if x == iv.a {
        return Ok(FractionalEvaluation::closed(0.0));
    }
    if opts.prefer_closed_form {
        if let Some(v) = f
            .terms()
            .and_then(|terms| left_closed_form(terms, iv, alpha, x))
        {
            return Ok(FractionalEvaluation::closed(v));
        }
    }
    let q = rl_left_of(|t| f.eval(t), iv.a, alpha, x, opts.n_panels)?;
    Ok(FractionalEvaluation::quadrature(q, 1.0))
}

/// Constants integrate in closed form everywhere; `(b−t)^β` terms only at
/// `x = b`, where the integral is `(b−a)^(α+β) / (Γ(α)(α+β))`.
fn left_closed_form(terms: &[Term], iv: Interval, alpha: f64, x: f64) -> Option<f64> {
    sum_terms(terms, |t| match *t {
        Term::Const(c) => Some(c * (x - iv.a).powf(alpha) / gamma_unchecked(alpha + 1.0)),
        Term::PowerAtB { c, beta } if x == iv.b => {
            Some(c * iv.len().powf(alpha + beta) / (gamma_unchecked(alpha) * (alpha + beta)))
        }
        Term::PowerAtB { .. } => None,
    })
}

/// Right Riemann–Liouville integral `J_{b−}^α f(x)`. Order zero is the
/// identity.
pub fn rl_integral_right(
    f: &ModelFunction,
    alpha: f64,
    x: f64,
    opts: &EvalOptions,
) -> Result<FractionalEvaluation> {
    check_order(alpha)?;
    let iv = f.interval();
    check_point(iv, x)?;
    if alpha == 0.0 {
        return Ok(FractionalEvaluation::closed(f.eval(x)));
    }
    if x == iv.b {
        return Ok(FractionalEvaluation::closed(0.0));
    }
    if opts.prefer_closed_form {
        if let Some(terms) = f.terms() {
            let d = iv.b - x;
            let v: f64 = terms
                .iter()
                .map(|t| match *t {
                    Term::Const(c) => c * d.powf(alpha) / gamma_unchecked(alpha + 1.0),
                    Term::PowerAtB { c, beta } => {
                        c * gamma_unchecked(beta + 1.0) / gamma_unchecked(alpha + beta + 1.0)
                            * d.powf(alpha + beta)
                    }
                })
                .sum();
            return Ok(FractionalEvaluation::closed(v));
        }
    }
    let q = rl_right_of(|t| f.eval(t), iv.b, alpha, x, opts.n_panels)?;
    Ok(FractionalEvaluation::quadrature(q, 1.0))
}

/// Exact right Caputo derivative of `c·(b−x)^β`:
/// `c·Γ(β+1)/Γ(β−α+1)·(b−x)^(β−α)`, valid for `β > m − 1`, `m = ⌈α⌉`.
/// Returns 0 for `x ≥ b`.
pub fn caputo_oracle_power(c: f64, beta: f64, alpha: f64, iv: Interval, x: f64) -> Result<f64> {
    let setup = FractionalSetup::new(alpha)?;
    let m = setup.m as f64;
    if !(beta > m - 1.0) || !beta.is_finite() {
        return Err(domain(format!(
            "power oracle needs beta > m - 1 = {}, got beta = {beta}",
            m - 1.0
        )));
    }
    if x < iv.a || x.is_nan() {
        return Err(domain(format!("point x = {x} lies below {iv}")));
    }
    if x >= iv.b {
        return Ok(0.0);
    }
    Ok(
        c * gamma_unchecked(beta + 1.0) / gamma_unchecked(beta - alpha + 1.0)
            * (iv.b - x).powf(beta - alpha),
    )
}

fn caputo_closed_form(
    terms: &[Term],
    setup: &FractionalSetup,
    iv: Interval,
    x: f64,
) -> Result<f64> {
    let m = setup.m as f64;
    terms
        .iter()
        .map(|t| match *t {
            Term::Const(_) => Ok(0.0),
            // Polynomials of degree below m have a vanishing m-th derivative.
            Term::PowerAtB { beta, .. } if beta == beta.trunc() && beta < m => Ok(0.0),
            Term::PowerAtB { c, beta } => caputo_oracle_power(c, beta, setup.alpha, iv, x),
        })
        .sum()
}

/// Right Caputo derivative `D_{b−}^α f(x)`.
///
/// Integer orders return `(−1)^m f^(m)(x)`; points beyond `b` return 0. The
/// non-integer quadrature route integrates `f^(m)` against
/// `(t−x)^(m−α−1)`.
pub fn caputo_right(
    f: &ModelFunction,
    setup: &FractionalSetup,
    x: f64,
    opts: &EvalOptions,
) -> Result<FractionalEvaluation> {
    let iv = f.interval();
    if x.is_nan() || x < iv.a {
        return Err(domain(format!("point x = {x} lies below {iv}")));
    }
    f.check_order(setup.m)?;
    if x > iv.b {
        return Ok(FractionalEvaluation::closed(0.0));
    }
    caputo_unchecked(f, setup, x, opts)
}

fn sign_of_order(m: usize) -> f64 {
    if m.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Caputo derivative for `x ∈ [a, b]` once the derivative order is known to
/// be available.
fn caputo_unchecked(
    f: &ModelFunction,
    setup: &FractionalSetup,
    x: f64,
    opts: &EvalOptions,
) -> Result<FractionalEvaluation> {
    let m = setup.m;
    let iv = f.interval();
    if setup.is_integer_order() {
        return Ok(FractionalEvaluation::closed(
            sign_of_order(m) * f.deriv_raw(m, x),
        ));
    }
    if x >= iv.b {
        return Ok(FractionalEvaluation::closed(0.0));
    }
    if opts.prefer_closed_form {
        if let Some(terms) = f.terms() {
            return caputo_closed_form(terms, setup, iv, x).map(FractionalEvaluation::closed);
        }
    }
    let mu = m as f64 - setup.alpha;
    let q = singular_integral(|t| f.deriv_raw(m, t), x, iv.b, mu, opts.n_panels)?;
    Ok(FractionalEvaluation::quadrature(
        q,
        sign_of_order(m) / gamma_unchecked(mu),
    ))
}

/// Evaluates `D_{b−}^α f` as a plain closure for use inside other integrals.
/// The first failure is kept and returned by [`CaputoProfile::finish`]; the
/// closure yields NaN after a failure. The largest pointwise error estimate
/// seen is tracked as well.
pub(crate) struct CaputoProfile<'a> {
    f: &'a ModelFunction,
    setup: &'a FractionalSetup,
    opts: &'a EvalOptions,
    max_err: Cell<f64>,
    failure: RefCell<Option<Error>>,
}

impl<'a> CaputoProfile<'a> {
    pub(crate) fn new(
        f: &'a ModelFunction,
        setup: &'a FractionalSetup,
        opts: &'a EvalOptions,
    ) -> Result<Self> {
        f.check_order(setup.m)?;
        Ok(Self {
            f,
            setup,
            opts,
            max_err: Cell::new(0.0),
            failure: RefCell::new(None),
        })
    }

    pub(crate) fn at(&self, t: f64) -> f64 {
        match caputo_unchecked(self.f, self.setup, t, self.opts) {
            Ok(e) => {
                self.max_err.set(self.max_err.get().max(e.err_estimate));
                e.value
            }
            Err(err) => {
                self.failure.borrow_mut().get_or_insert(err);
                f64::NAN
            }
        }
    }

    /// Maximum pointwise error estimate, or the first error seen.
    pub(crate) fn finish<T>(self, result: Result<T>) -> Result<(T, f64)> {
        if let Some(err) = self.failure.into_inner() {
            return Err(err);
        }
        result.map(|v| (v, self.max_err.get()))
    }
}

/// Right Caputo Taylor reconstruction of `f(x)`:
///
/// `Σ_{k<m} f^(k)(b)/k!·(x−b)^k + (1/Γ(α))∫_x^b (t−x)^(α−1) D_{b−}^α f(t) dt`.
///
/// The error estimate combines the outer quadrature estimate with the
/// largest inner (Caputo) estimate integrated against the kernel.
pub fn taylor_reconstruct(
    f: &ModelFunction,
    setup: &FractionalSetup,
    x: f64,
    opts: &EvalOptions,
) -> Result<FractionalEvaluation> {
    let iv = f.interval();
    check_point(iv, x)?;
    f.check_order(setup.m)?;
    let mut series = 0.0;
    let mut factorial = 1.0;
    for k in 0..setup.m {
        if k > 0 {
            factorial *= k as f64;
        }
        let fk = f.boundary(k)?;
        if fk != 0.0 {
            series += fk / factorial * (x - iv.b).powi(k as i32);
        }
    }
    if x == iv.b {
        return Ok(FractionalEvaluation::closed(series));
    }
    let profile = CaputoProfile::new(f, setup, opts)?;
    let outer = match blowup_exponent(f, setup) {
        // D^α f ~ (b−t)^e near b: split at the midpoint and give the upper
        // half its own kernel s^e in s = b − t.
        Some(e) => {
            let (alpha, n) = (setup.alpha, opts.n_panels);
            let mid = 0.5 * (x + iv.b);
            let head = singular_integral(|t| profile.at(t), x, mid, alpha, n);
            let tail = singular_integral(
                |s| {
                    if s == 0.0 {
                        0.0
                    } else {
                        (iv.b - s - x).powf(alpha - 1.0) * profile.at(iv.b - s) * s.powf(-e)
                    }
                },
                0.0,
                iv.b - mid,
                1.0 + e,
                n,
            );
            head.and_then(|h| tail.map(|t| (h, t))).map(|(h, t)| {
                let g = gamma_unchecked(alpha);
                QuadResult {
                    value: (h.value + t.value) / g,
                    err_estimate: (h.err_estimate + t.err_estimate) / g,
                }
            })
        }
        None => rl_right_of(|t| profile.at(t), iv.b, setup.alpha, x, opts.n_panels),
    };
    let (q, inner_err) = profile.finish(outer)?;
    let kernel_mass = (iv.b - x).powf(setup.alpha) / gamma_unchecked(setup.alpha + 1.0);
    Ok(FractionalEvaluation {
        value: series + q.value,
        err_estimate: q.err_estimate + inner_err * kernel_mass,
        method: Method::Quadrature,
    })
}

/// Most negative exponent `e ∈ (−1, 0)` with `D_{b−}^α f(t) ~ (b−t)^e` as
/// `t → b`, for term-built functions.
fn blowup_exponent(f: &ModelFunction, setup: &FractionalSetup) -> Option<f64> {
    let m = setup.m as f64;
    f.terms()?
        .iter()
        .filter_map(|t| match *t {
            Term::PowerAtB { c, beta }
                if c != 0.0 && beta < setup.alpha && !(beta == beta.trunc() && beta < m) =>
            {
                Some(beta - setup.alpha)
            }
            _ => None,
        })
        .reduce(f64::min)
}

/// `(J_{a+}^s |f|)(b) = (1/Γ(s))∫_a^b (b−x)^(s−1)|f(x)| dx`, in closed form
/// when `f` is term-built with coefficients of one sign.
pub(crate) fn rl_left_abs_at_b(
    f: &ModelFunction,
    s: f64,
    opts: &EvalOptions,
) -> Result<FractionalEvaluation> {
    let iv = f.interval();
    if opts.prefer_closed_form {
        if let (Some(sign), Some(terms)) = (f.sign_definite(), f.terms()) {
            if let Some(v) = left_closed_form(terms, iv, s, iv.b) {
                return Ok(FractionalEvaluation::closed(sign * v));
            }
        }
    }
    let q = rl_left_of(|t| f.eval(t).abs(), iv.a, s, iv.b, opts.n_panels)?;
    Ok(FractionalEvaluation::quadrature(q, 1.0))
}

/// Operators available to convergence studies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Operator {
    RlLeft,
    RlRight,
    CaputoRight,
    Taylor,
}

impl Operator {
    pub fn evaluate(
        self,
        f: &ModelFunction,
        setup: &FractionalSetup,
        x: f64,
        opts: &EvalOptions,
    ) -> Result<FractionalEvaluation> {
        match self {
            Operator::RlLeft => rl_integral_left(f, setup.alpha, x, opts),
            Operator::RlRight => rl_integral_right(f, setup.alpha, x, opts),
            Operator::CaputoRight => caputo_right(f, setup, x, opts),
            Operator::Taylor => taylor_reconstruct(f, setup, x, opts),
        }
    }

    /// Exact value of the operator, when one is available.
    pub fn oracle(self, f: &ModelFunction, setup: &FractionalSetup, x: f64) -> Result<f64> {
        if f.terms().is_none() {
            return Err(domain(format!("{} has no closed-form oracle", f.id())));
        }
        if self == Operator::Taylor {
            check_point(f.interval(), x)?;
            return Ok(f.eval(x));
        }
        let e = self.evaluate(f, setup, x, &EvalOptions::default())?;
        match e.method {
            Method::ClosedForm => Ok(e.value),
            Method::Quadrature => Err(domain(format!(
                "{} has no closed-form oracle for this operator at x = {x}",
                f.id()
            ))),
        }
    }
}

/// One line of a convergence study.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub n_panels: usize,
    pub value: f64,
    pub abs_error_vs_oracle: f64,
    /// `log2(err(n/2)/err(n))` against the previous row; absent on the first
    /// row or when either error is zero.
    pub empirical_order: Option<f64>,
}

/// Quadrature-only evaluations of `op` at each panel count, compared with the
/// closed-form oracle.
pub fn convergence_table(
    op: Operator,
    f: &ModelFunction,
    setup: &FractionalSetup,
    x: f64,
    panels: &[usize],
) -> Result<Vec<ConvergenceRow>> {
    let exact = op.oracle(f, setup, x)?;
    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(panels.len());
    for &n in panels {
        let e = op.evaluate(f, setup, x, &EvalOptions::quadrature_only(n))?;
        let err = (e.value - exact).abs();
        let empirical_order = rows.last().and_then(|prev| {
            let ratio = prev.abs_error_vs_oracle / err;
            (err > 0.0 && prev.abs_error_vs_oracle > 0.0 && ratio.is_finite())
                .then(|| ratio.log2() * (n as f64 / prev.n_panels as f64).log2().recip())
        });
        rows.push(ConvergenceRow {
            n_panels: n,
            value: e.value,
            abs_error_vs_oracle: err,
            empirical_order,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{make_power_at_b, parse_function_spec, sample_corpus};
    use crate::special::{beta, gamma};
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn unit() -> Interval {
        Interval::unit()
    }

    fn spec(s: &str) -> ModelFunction {
        parse_function_spec(s, unit()).unwrap()
    }

    fn opaque_t() -> ModelFunction {
        ModelFunction::opaque(
            unit(),
            "t",
            vec![Arc::new(|t: f64| t), Arc::new(|_| 1.0), Arc::new(|_| 0.0)],
        )
        .unwrap()
    }

    /// Independent oracle: Definition-level integral for `c(b−t)^β`, done as a
    /// Beta integral `∫_x^b (t−x)^(m−α−1)(b−t)^(β−m) dt = B(m−α, β−m+1)(b−x)^(β−α)`.
    fn caputo_power_by_beta(c: f64, b_exp: f64, alpha: f64, x: f64) -> f64 {
        let m = alpha.ceil();
        let dm = gamma(b_exp + 1.0).unwrap() / gamma(b_exp - m + 1.0).unwrap();
        // f^(m) = c(−1)^m dm (b−t)^(β−m); (−1)^m · (−1)^m = 1
        c * dm * beta(m - alpha, b_exp - m + 1.0).unwrap() * (1.0 - x).powf(b_exp - alpha)
            / gamma(m - alpha).unwrap()
    }

    #[test]
    fn identity_order() {
        let f = spec("const:0.5;powb:c=2,beta=1.7");
        let opts = EvalOptions::default();
        for x in [0.0, 0.3, 1.0] {
            let l = rl_integral_left(&f, 0.0, x, &opts).unwrap();
            let r = rl_integral_right(&f, 0.0, x, &opts).unwrap();
            assert_eq!(l.value, f.eval(x));
            assert_eq!(r.value, f.eval(x));
            assert_eq!(l.method, Method::ClosedForm);
        }
        let t = opaque_t();
        assert_eq!(rl_integral_left(&t, 0.0, 0.3, &opts).unwrap().value, 0.3);
    }

    #[test]
    fn left_integral_examples() {
        let one = spec("const:1");
        let iv = Interval::new(0.5, 2.0).unwrap();
        let one_shifted = parse_function_spec("const:1", iv).unwrap();
        for opts in [EvalOptions::default(), EvalOptions::quadrature_only(64)] {
            let v = rl_integral_left(&one, 1.0, 0.7, &opts).unwrap().value;
            assert_relative_eq!(v, 0.7, max_relative = 1e-13);
            let v = rl_integral_left(&one_shifted, 1.0, 1.2, &opts)
                .unwrap()
                .value;
            assert_relative_eq!(v, 0.7, max_relative = 1e-13);
        }
        // J^{1/2} t at x = 1 is Γ(2)/Γ(2.5).
        let expected = 0.752_252_778_063_675;
        let t = opaque_t();
        let q = rl_integral_left(&t, 0.5, 1.0, &EvalOptions::default()).unwrap();
        assert_eq!(q.method, Method::Quadrature);
        assert!((q.value - expected).abs() <= 1e-12_f64.max(q.err_estimate));
        // t = 1 − (1−t) as terms: closed form at x = b.
        let t_terms = spec("const:1;powb:c=-1,beta=1");
        let c = rl_integral_left(&t_terms, 0.5, 1.0, &EvalOptions::default()).unwrap();
        assert_eq!(c.method, Method::ClosedForm);
        assert_relative_eq!(c.value, expected, max_relative = 1e-13);
        assert!(rl_integral_left(&t, 0.5, 1.5, &EvalOptions::default()).is_err());
        assert!(rl_integral_left(&t, -0.5, 0.5, &EvalOptions::default()).is_err());
    }

    #[test]
    fn right_integral_examples() {
        let c = spec("const:3");
        for opts in [EvalOptions::default(), EvalOptions::quadrature_only(32)] {
            let v = rl_integral_right(&c, 1.0, 0.25, &opts).unwrap().value;
            assert_relative_eq!(v, 3.0 * 0.75, max_relative = 1e-13);
        }
        let f = spec("powb:c=1,beta=1");
        let expected = beta(0.5, 2.0).unwrap() / gamma(0.5).unwrap();
        assert_relative_eq!(expected, 0.752_252_778_1, max_relative = 1e-10);
        let closed = rl_integral_right(&f, 0.5, 0.0, &EvalOptions::default()).unwrap();
        assert_relative_eq!(closed.value, expected, max_relative = 1e-13);
        let quad = rl_integral_right(&f, 0.5, 0.0, &EvalOptions::quadrature_only(512)).unwrap();
        assert!((quad.value - expected).abs() <= 1e-12);
        assert_eq!(
            rl_integral_right(&f, 0.5, 1.0, &EvalOptions::default())
                .unwrap()
                .value,
            0.0
        );
    }

    #[test]
    fn caputo_examples() {
        let opts = EvalOptions::default();
        // Integer order: (−1)^m f^(m)(x)
        let f = spec("powb:c=1.3,beta=2.6");
        for m in 1..=2usize {
            let setup = FractionalSetup::new(m as f64).unwrap();
            let x = 0.4;
            let want = sign_of_order(m) * f.deriv(m, x).unwrap();
            assert_eq!(caputo_right(&f, &setup, x, &opts).unwrap().value, want);
        }
        // Constants have vanishing fractional derivative.
        let c = spec("const:4");
        let half = FractionalSetup::new(0.5).unwrap();
        for o in [opts, EvalOptions::quadrature_only(64)] {
            assert_eq!(caputo_right(&c, &half, 0.3, &o).unwrap().value, 0.0);
        }
        // D^{1/2}(1−t) at 0 is 2/√π.
        let lin = spec("powb:c=1,beta=1");
        let want = 2.0 / std::f64::consts::PI.sqrt();
        let e = caputo_right(&lin, &half, 0.0, &opts).unwrap();
        assert_eq!(e.method, Method::ClosedForm);
        assert_eq!(e.err_estimate, 0.0);
        assert_relative_eq!(e.value, want, max_relative = 1e-14);
        let q = caputo_right(&lin, &half, 0.0, &EvalOptions::quadrature_only(256)).unwrap();
        assert_eq!(q.method, Method::Quadrature);
        assert_relative_eq!(q.value, want, max_relative = 1e-12);
        // Beyond b.
        assert_eq!(caputo_right(&lin, &half, 1.5, &opts).unwrap().value, 0.0);
        assert!(caputo_right(&lin, &half, -0.1, &opts).is_err());
        // Not enough derivatives.
        let short = ModelFunction::opaque(unit(), "t", vec![Arc::new(|t: f64| t)]).unwrap();
        assert!(matches!(
            caputo_right(&short, &half, 0.2, &opts),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn integer_order_degeneration() {
        let one = FractionalSetup::new(1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for f in sample_corpus(&one, unit(), 20, 8).unwrap() {
            let x: f64 = rng.random_range(0.0..1.0);
            for opts in [EvalOptions::default(), EvalOptions::quadrature_only(16)] {
                let v = caputo_right(&f, &one, x, &opts).unwrap().value;
                assert_eq!(v, -f.deriv(1, x).unwrap());
            }
        }
    }

    #[test]
    fn power_oracle_examples() {
        let iv = unit();
        for alpha in [0.3, 0.5, 1.5, 2.2] {
            for x in [0.0, 0.4, 0.9] {
                let v = caputo_oracle_power(1.0, alpha, alpha, iv, x).unwrap();
                assert_relative_eq!(v, gamma(alpha + 1.0).unwrap(), max_relative = 1e-14);
            }
        }
        assert_relative_eq!(
            caputo_oracle_power(1.0, 2.0, 2.0, iv, 0.3).unwrap(),
            2.0,
            max_relative = 1e-15
        );
        let v = caputo_oracle_power(3.0, 1.5, 0.5, iv, 0.5).unwrap();
        assert_relative_eq!(v, 1.994_010_582_268_705_5, max_relative = 1e-13);
        assert!(matches!(
            caputo_oracle_power(1.0, 1.0, 2.5, iv, 0.5),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            caputo_oracle_power(1.0, 0.5, 1.5, iv, 0.5),
            Err(Error::Domain(_))
        ));
        assert_eq!(caputo_oracle_power(1.0, 1.5, 0.5, iv, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn power_oracle_matches_beta_integral_and_brute_force_quadrature() {
        let iv = unit();
        for (c, b_exp, alpha, x) in [
            (3.0, 1.5, 0.5, 0.5),
            (1.0, 2.5, 0.5, 0.0),
            (-0.7, 3.3, 2.4, 0.2),
        ] {
            let oracle = caputo_oracle_power(c, b_exp, alpha, iv, x).unwrap();
            assert_relative_eq!(
                oracle,
                caputo_power_by_beta(c, b_exp, alpha, x),
                max_relative = 1e-12
            );
            // Definition-level quadrature at 2^15 panels.
            let f = make_power_at_b(c, b_exp, iv).unwrap();
            let setup = FractionalSetup::new(alpha).unwrap();
            let m = setup.m;
            let mu = m as f64 - alpha;
            let q = singular_integral(|t| f.deriv(m, t).unwrap(), x, 1.0, mu, 1 << 15).unwrap();
            let scale = 1.0 / gamma(mu).unwrap();
            let brute = sign_of_order(m) * q.value * scale;
            // f^(m) ~ (b−t)^(β−m) limits convergence near b for small β−m.
            let tol = (1e-6 * oracle.abs().max(1.0)).max(3.0 * q.err_estimate * scale);
            assert!(
                (brute - oracle).abs() <= tol,
                "c={c} beta={b_exp} alpha={alpha}: {brute} vs {oracle}"
            );
        }
    }

    #[test]
    fn power_oracle_with_singular_top_derivative() {
        // m − 1 < β < m: f^(m) is integrable but unbounded at b.
        let (c, b_exp, alpha, x) = (1.2, 1.1, 1.6, 0.75);
        assert_relative_eq!(
            caputo_oracle_power(c, b_exp, alpha, unit(), x).unwrap(),
            caputo_power_by_beta(c, b_exp, alpha, x),
            max_relative = 1e-12
        );
        let f = make_power_at_b(c, b_exp, unit()).unwrap();
        let setup = FractionalSetup::new(alpha).unwrap();
        let quad = caputo_right(&f, &setup, x, &EvalOptions::quadrature_only(64));
        assert!(matches!(quad, Err(Error::Evaluation(_))));
    }

    #[test]
    fn quadrature_agrees_with_closed_form_for_random_powers() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..20 {
            let alpha: f64 = rng.random_range(0.1..2.9);
            if (alpha - alpha.round()).abs() < 0.05 {
                continue;
            }
            let m = alpha.ceil();
            let b_exp = loop {
                let b: f64 = rng.random_range(m..m + 3.0);
                if (b - b.round()).abs() >= 0.05 {
                    break b;
                }
            };
            let c: f64 = rng.random_range(-2.0..2.0);
            let f = make_power_at_b(c, b_exp, unit()).unwrap();
            let setup = FractionalSetup::new(alpha).unwrap();
            for _ in 0..5 {
                let x: f64 = rng.random_range(0.0..1.0);
                let exact = caputo_right(&f, &setup, x, &EvalOptions::default()).unwrap();
                let q = caputo_right(&f, &setup, x, &EvalOptions::quadrature_only(512)).unwrap();
                assert!(
                    (q.value - exact.value).abs() <= 1e-6f64.max(3.0 * q.err_estimate),
                    "alpha={alpha} beta={b_exp} x={x}: {} vs {} (est {})",
                    q.value,
                    exact.value,
                    q.err_estimate
                );
            }
        }
    }

    #[test]
    fn semigroup_spot_check() {
        // J^{1/2}(J^{1/2} t) = J^1 t = x²/2 on [0, 1].
        let n = DEFAULT_PANELS;
        for x in [0.25, 0.5, 1.0] {
            let outer = rl_left_of(
                |s| {
                    if s <= 0.0 {
                        0.0
                    } else {
                        rl_left_of(|t| t, 0.0, 0.5, s, n).unwrap().value
                    }
                },
                0.0,
                0.5,
                x,
                n,
            )
            .unwrap();
            assert!(
                (outer.value - x * x / 2.0).abs() <= 1e-5,
                "x = {x}: {}",
                outer.value
            );
        }
    }

    #[test]
    fn taylor_examples() {
        let opts = EvalOptions::default();
        let half = FractionalSetup::new(0.5).unwrap();
        let c = spec("const:2");
        for x in [0.0, 0.7, 1.0] {
            assert_eq!(taylor_reconstruct(&c, &half, x, &opts).unwrap().value, 2.0);
        }
        let lin = spec("powb:c=1,beta=1");
        let r = taylor_reconstruct(&lin, &half, 0.25, &opts).unwrap();
        assert!(
            (r.value - 0.75).abs() <= 1e-12f64.max(5.0 * r.err_estimate),
            "{r:?}"
        );

        let quad = spec("powb:c=1,beta=2");
        let s15 = FractionalSetup::new(1.5).unwrap();
        let r = taylor_reconstruct(&quad, &s15, 0.0, &opts).unwrap();
        assert!(
            (r.value - 1.0).abs() <= 1e-12f64.max(5.0 * r.err_estimate),
            "{r:?}"
        );
        // Two-layer quadrature.
        let r = taylor_reconstruct(&quad, &s15, 0.0, &EvalOptions::quadrature_only(256)).unwrap();
        assert!(
            (r.value - 1.0).abs() <= 1e-5f64.max(5.0 * r.err_estimate),
            "{r:?}"
        );
    }

    #[test]
    fn taylor_uses_boundary_series_for_higher_orders() {
        // f(t) = 1 + 2(1−t) − (1−t)^2.5 with α = 2.3 (m = 3): f'(b) ≠ 0, so the
        // series term carries the linear part.
        let f = spec("const:1;powb:c=2,beta=1;powb:c=-1,beta=2.5");
        let setup = FractionalSetup::new(2.3).unwrap();
        for x in [0.0, 0.3, 0.8] {
            let r = taylor_reconstruct(&f, &setup, x, &EvalOptions::default()).unwrap();
            assert!((r.value - f.eval(x)).abs() <= 1e-5f64.max(5.0 * r.err_estimate));
        }
    }

    #[test]
    fn taylor_with_caputo_profile_unbounded_at_b() {
        // β ∈ (m−1, α) makes D^α f ~ (b−t)^(β−α) blow up at b.
        let setup = FractionalSetup::new(1.6).unwrap();
        for text in [
            "powb:c=1,beta=1.1",
            "const:0.5;powb:c=1,beta=1.3;powb:c=-2,beta=2.4",
        ] {
            let f = spec(text);
            for x in [0.0, 0.2, 0.9] {
                let r = taylor_reconstruct(&f, &setup, x, &EvalOptions::default()).unwrap();
                let dev = (r.value - f.eval(x)).abs();
                assert!(
                    dev <= 1e-5f64.max(5.0 * r.err_estimate),
                    "{text} x = {x}: {r:?}"
                );
                assert!(dev <= 1e-4, "{text} x = {x}: {r:?}");
            }
        }
    }

    #[test]
    fn convergence_table_reference_case() {
        let f = spec("powb:c=1,beta=2.5");
        let half = FractionalSetup::new(0.5).unwrap();
        let rows = convergence_table(
            Operator::CaputoRight,
            &f,
            &half,
            0.0,
            &[64, 128, 256, 512, 1024],
        )
        .unwrap();
        assert!(rows[0].empirical_order.is_none());
        for row in &rows[3..] {
            assert!(row.empirical_order.unwrap() >= 1.8, "{rows:?}");
        }
        let rows =
            convergence_table(Operator::RlRight, &spec("const:1"), &half, 0.0, &[64, 128]).unwrap();
        assert!(rows.iter().all(|r| r.abs_error_vs_oracle < 1e-13));
        let rows = convergence_table(
            Operator::Taylor,
            &spec("powb:c=1,beta=1"),
            &half,
            0.25,
            &[64, 128, 256, 512, 1024],
        )
        .unwrap();
        for w in rows.windows(2) {
            assert!(
                w[1].abs_error_vs_oracle < w[0].abs_error_vs_oracle,
                "{rows:?}"
            );
        }
        // No closed form for the left integral of a power at an interior point.
        assert!(convergence_table(Operator::RlLeft, &f, &half, 0.5, &[64]).is_err());
        assert!(convergence_table(Operator::CaputoRight, &opaque_t(), &half, 0.5, &[64]).is_err());
    }

    #[test]
    fn abs_left_integral_at_b() {
        let opts = EvalOptions::default();
        let f = spec("powb:c=1,beta=1");
        let e = rl_left_abs_at_b(&f, 1.5, &opts).unwrap();
        assert_eq!(e.method, Method::ClosedForm);
        assert_relative_eq!(e.value, 0.4 / gamma(1.5).unwrap(), max_relative = 1e-14);
        let neg = spec("const:-1;powb:c=-2,beta=1.2");
        let c = rl_left_abs_at_b(&neg, 1.3, &opts).unwrap();
        let q = rl_left_abs_at_b(&neg, 1.3, &EvalOptions::quadrature_only(512)).unwrap();
        assert!(c.value > 0.0);
        assert!(
            (c.value - q.value).abs() <= 3.0 * q.err_estimate,
            "{c:?} {q:?}"
        );
        // Sign change: |f| has a kink, quadrature only.
        let mixed = spec("const:1;powb:c=-2,beta=1");
        let e = rl_left_abs_at_b(&mixed, 1.0, &opts).unwrap();
        assert_eq!(e.method, Method::Quadrature);
        // ∫_0^1 |2t − 1| dt = 1/2
        assert!((e.value - 0.5).abs() <= 1e-5);
    }
}
