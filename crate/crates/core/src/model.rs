//! Test functions with analytic derivative stacks.
//!
//! A [`ModelFunction`] lives on an [`Interval`] and knows its derivatives up to
//! a declared order. Functions built from constants and `c·(b−t)^β` terms carry
//! an [`OracleClass`] that lets the fractional operators use exact closed forms.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::special::falling_factorial;

/// Derivative order reported for functions whose derivatives exist (and are
/// eventually zero) to every order.
pub const UNBOUNDED_ORDER: usize = 32;

/// Closed interval `[a, b]` with `a < b`, both finite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub a: f64,
    pub b: f64,
}

impl Interval {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !a.is_finite() || !b.is_finite() {
            return Err(domain(format!(
                "interval endpoints must be finite, got [{a}, {b}]"
            )));
        }
        if a >= b {
            return Err(domain(format!("interval requires a < b, got [{a}, {b}]")));
        }
        Ok(Self { a, b })
    }

    pub fn unit() -> Self {
        Self { a: 0.0, b: 1.0 }
    }

    pub fn len(&self) -> f64 {
        self.b - self.a
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.a + self.b)
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.a && x <= self.b
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.a, self.b)
    }
}

/// Fractional order together with its integer ceiling and optional Hölder
/// exponents.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FractionalSetup {
    pub alpha: f64,
    pub m: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
}

impl FractionalSetup {
    /// Setup without Hölder exponents. `m = ⌈α⌉`.
    pub fn new(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() || alpha <= 0.0 {
            return Err(domain(format!(
                "order alpha must be positive and finite, got {alpha}"
            )));
        }
        Ok(Self {
            alpha,
            m: alpha.ceil() as usize,
            p: None,
            q: None,
        })
    }

    /// Setup with exponent `p` and its conjugate `q = p/(p−1)`. Requires
    /// `p > 1` and `α > 1 − 1/p`.
    pub fn with_holder(alpha: f64, p: f64) -> Result<Self> {
        let mut setup = Self::new(alpha)?;
        if !p.is_finite() || p <= 1.0 {
            return Err(domain(format!("Hölder exponent p must exceed 1, got {p}")));
        }
        if alpha <= 1.0 - 1.0 / p {
            return Err(domain(format!(
                "alpha = {alpha} must exceed 1 - 1/p = {}",
                1.0 - 1.0 / p
            )));
        }
        setup.p = Some(p);
        setup.q = Some(p / (p - 1.0));
        Ok(setup)
    }

    /// Checks the stored fields, e.g. after deserialization.
    pub fn validate(&self) -> Result<()> {
        let fresh = match self.p {
            Some(p) => Self::with_holder(self.alpha, p)?,
            None => Self::new(self.alpha)?,
        };
        if fresh.m != self.m {
            return Err(domain(format!(
                "m = {} is not the ceiling of alpha = {}",
                self.m, self.alpha
            )));
        }
        match (self.p, self.q) {
            (Some(p), Some(q)) if (1.0 / p + 1.0 / q - 1.0).abs() > 1e-12 => {
                Err(domain(format!("p = {p} and q = {q} are not conjugate")))
            }
            (Some(_), None) | (None, Some(_)) => Err(domain("p and q must be given together")),
            _ => Ok(()),
        }
    }

    pub fn is_integer_order(&self) -> bool {
        self.alpha == self.m as f64
    }

    /// `(p, q)` or a hypothesis error naming the caller's requirement.
    pub fn holder(&self) -> Result<(f64, f64)> {
        match (self.p, self.q) {
            (Some(p), Some(q)) => Ok((p, q)),
            _ => Err(Error::Hypothesis(
                "Hölder exponents p, q are required".into(),
            )),
        }
    }
}

/// One term of a sum-of-terms function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Term {
    Const(f64),
    /// `c·(b−t)^β`
    PowerAtB {
        c: f64,
        beta: f64,
    },
}

impl Term {
    fn deriv(&self, k: usize, b: f64, t: f64) -> f64 {
        match *self {
            Term::Const(c) => {
                if k == 0 {
                    c
                } else {
                    0.0
                }
            }
            Term::PowerAtB { c, beta } => {
                if beta == beta.trunc() && k as f64 > beta {
                    return 0.0;
                }
                let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
                let d = (b - t).max(0.0);
                c * sign * falling_factorial(beta, k) * d.powf(beta - k as f64)
            }
        }
    }

    /// Highest derivative order that is at least integrable on `[a, b]`.
    fn max_order(&self) -> usize {
        match *self {
            Term::Const(_) => UNBOUNDED_ORDER,
            Term::PowerAtB { beta, .. } => {
                if beta == beta.trunc() {
                    UNBOUNDED_ORDER
                } else {
                    beta.floor() as usize + 1
                }
            }
        }
    }

    fn coefficient(&self) -> f64 {
        match *self {
            Term::Const(c) | Term::PowerAtB { c, .. } => c,
        }
    }

    fn scaled(&self, k: f64) -> Term {
        match *self {
            Term::Const(c) => Term::Const(k * c),
            Term::PowerAtB { c, beta } => Term::PowerAtB { c: k * c, beta },
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Const(c) => write!(f, "const:{c}"),
            Term::PowerAtB { c, beta } => write!(f, "powb:c={c},beta={beta}"),
        }
    }
}

/// Which closed forms are available for a function.
#[derive(Debug, Clone, PartialEq)]
pub enum OracleClass {
    PowerAtB { c: f64, beta: f64 },
    Constant(f64),
    SumOfTerms(Vec<Term>),
    Opaque,
}

/// Derivative `f^(k)` as a shareable closure.
pub type DerivFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
enum Body {
    Terms(Vec<Term>),
    Opaque(Vec<DerivFn>),
}

/// An evaluable function on an interval with analytic derivatives up to
/// `deriv_order_max` and cached boundary data `f^(k)(b)`.
#[derive(Clone)]
pub struct ModelFunction {
    iv: Interval,
    id: String,
    body: Body,
    class: OracleClass,
    deriv_order_max: usize,
    boundary: Vec<f64>,
}

impl fmt::Debug for ModelFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ModelFunction")
            .field("id", &self.id)
            .field("iv", &self.iv)
            .field("class", &self.class)
            .field("deriv_order_max", &self.deriv_order_max)
            .finish()
    }
}

impl ModelFunction {
    fn from_terms(iv: Interval, terms: Vec<Term>, class: OracleClass, cap: Option<usize>) -> Self {
        let natural = terms
            .iter()
            .map(Term::max_order)
            .min()
            .unwrap_or(UNBOUNDED_ORDER);
        let deriv_order_max = cap.map_or(natural, |c| c.min(natural));
        let id = terms
            .iter()
            .map(Term::to_string)
            .collect::<Vec<_>>()
            .join(";");
        let body = Body::Terms(terms);
        let mut f = Self {
            iv,
            id,
            body,
            class,
            deriv_order_max,
            boundary: Vec::new(),
        };
        f.boundary = (0..=deriv_order_max)
            .map(|k| f.deriv_raw(k, iv.b))
            .collect();
        f
    }

    /// Builds a function from a sum of terms. A single term keeps its specific
    /// oracle class; anything longer is tagged sum-of-terms.
    pub fn from_term_list(iv: Interval, terms: Vec<Term>) -> Result<Self> {
        if terms.is_empty() {
            return Err(domain("a function needs at least one term"));
        }
        for t in &terms {
            match *t {
                Term::Const(c) if !c.is_finite() => return Err(domain("non-finite constant")),
                Term::PowerAtB { c, beta } if !c.is_finite() || !beta.is_finite() || beta < 0.0 => {
                    return Err(domain(format!("invalid power term c={c}, beta={beta}")))
                }
                _ => {}
            }
        }
        let class = match terms.as_slice() {
            [Term::Const(c)] => OracleClass::Constant(*c),
            [Term::PowerAtB { c, beta }] => OracleClass::PowerAtB { c: *c, beta: *beta },
            _ => OracleClass::SumOfTerms(terms.clone()),
        };
        Ok(Self::from_terms(iv, terms, class, None))
    }

    /// A constant function.
    pub fn constant(iv: Interval, c: f64) -> Result<Self> {
        Self::from_term_list(iv, vec![Term::Const(c)])
    }

    /// Function given by an explicit derivative stack `[f, f', f'', ...]`.
    /// No closed forms are available for such functions.
    pub fn opaque(iv: Interval, id: impl Into<String>, derivs: Vec<DerivFn>) -> Result<Self> {
        if derivs.is_empty() {
            return Err(domain("an opaque function needs at least f itself"));
        }
        let deriv_order_max = derivs.len() - 1;
        let mut f = Self {
            iv,
            id: id.into(),
            body: Body::Opaque(derivs),
            class: OracleClass::Opaque,
            deriv_order_max,
            boundary: Vec::new(),
        };
        f.boundary = (0..=deriv_order_max)
            .map(|k| f.deriv_raw(k, iv.b))
            .collect();
        Ok(f)
    }

    pub fn interval(&self) -> Interval {
        self.iv
    }

    /// Identifier; for term-built functions this is the mini-language spec.
    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn oracle_class(&self) -> &OracleClass {
        &self.class
    }

    pub fn deriv_order_max(&self) -> usize {
        self.deriv_order_max
    }

    /// The term list when the function is built from constants and powers.
    pub fn terms(&self) -> Option<&[Term]> {
        match &self.body {
            Body::Terms(t) => Some(t),
            Body::Opaque(_) => None,
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.deriv_raw(0, t)
    }

    /// `f^(k)(t)`.
    pub fn deriv(&self, k: usize, t: f64) -> Result<f64> {
        self.check_order(k)?;
        Ok(self.deriv_raw(k, t))
    }

    /// Cached `f^(k)(b)`.
    pub fn boundary(&self, k: usize) -> Result<f64> {
        self.check_order(k)?;
        Ok(self.boundary[k])
    }

    pub(crate) fn check_order(&self, k: usize) -> Result<()> {
        if k > self.deriv_order_max {
            Err(domain(format!(
                "derivative of order {k} requested but only {} available for {}",
                self.deriv_order_max, self.id
            )))
        } else {
            Ok(())
        }
    }

    pub(crate) fn deriv_raw(&self, k: usize, t: f64) -> f64 {
        match &self.body {
            Body::Terms(terms) => terms.iter().map(|term| term.deriv(k, self.iv.b, t)).sum(),
            Body::Opaque(d) => d[k](t),
        }
    }

    /// True when `|f|` equals `±f` on the whole interval because every term
    /// has a coefficient of the same sign (powers of `b−t` are nonnegative).
    pub(crate) fn sign_definite(&self) -> Option<f64> {
        let terms = self.terms()?;
        if terms.iter().all(|t| t.coefficient() >= 0.0) {
            Some(1.0)
        } else if terms.iter().all(|t| t.coefficient() <= 0.0) {
            Some(-1.0)
        } else {
            None
        }
    }

    /// `k·f`. Term-built functions stay closed-form and are tagged sum-of-terms.
    pub fn scaled(&self, k: f64) -> Result<Self> {
        if !k.is_finite() {
            return Err(domain("scale factor must be finite"));
        }
        match &self.body {
            Body::Terms(terms) => {
                let terms: Vec<Term> = terms.iter().map(|t| t.scaled(k)).collect();
                let class = OracleClass::SumOfTerms(terms.clone());
                Ok(Self::from_terms(
                    self.iv,
                    terms,
                    class,
                    Some(self.deriv_order_max),
                ))
            }
            Body::Opaque(d) => {
                let scaled = d
                    .iter()
                    .map(|g| {
                        let g = Arc::clone(g);
                        Arc::new(move |t: f64| k * g(t)) as DerivFn
                    })
                    .collect();
                Self::opaque(self.iv, format!("{k}*({})", self.id), scaled)
            }
        }
    }

    /// `f + g` on a common interval.
    pub fn try_add(&self, other: &Self) -> Result<Self> {
        if self.iv != other.iv {
            return Err(domain(format!(
                "cannot add functions on different intervals {} and {}",
                self.iv, other.iv
            )));
        }
        let cap = self.deriv_order_max.min(other.deriv_order_max);
        match (&self.body, &other.body) {
            (Body::Terms(x), Body::Terms(y)) => {
                let terms: Vec<Term> = x.iter().chain(y).copied().collect();
                let class = OracleClass::SumOfTerms(terms.clone());
                Ok(Self::from_terms(self.iv, terms, class, Some(cap)))
            }
            _ => {
                let stack = (0..=cap)
                    .map(|k| {
                        let (f, g) = (self.clone(), other.clone());
                        Arc::new(move |t: f64| f.deriv_raw(k, t) + g.deriv_raw(k, t)) as DerivFn
                    })
                    .collect();
                Self::opaque(self.iv, format!("({})+({})", self.id, other.id), stack)
            }
        }
    }

    /// Compares every available `f^(k)`, k ≥ 1, against a central difference
    /// of `f^(k−1)` at 32 random interior points, and checks `f^(0) = eval`.
    ///
    /// The base step is `h = (b−a)·1e-4`; points closer than `10h` to an end
    /// are skipped, and the step shrinks to a thousandth of the distance to the
    /// nearest endpoint so that `(b−t)^(β−k)` profiles stay resolved. A point
    /// passes when the discrepancy is within `1e-5·max(1, |f^(k)(t)|)`.
    pub fn check_derivative_stack(&self, seed: u64) -> Result<()> {
        let h = self.iv.len() * 1e-4;
        let lo = self.iv.a + 10.0 * h;
        let hi = self.iv.b - 10.0 * h;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..32 {
            let t: f64 = rng.random_range(lo..hi);
            if self.deriv_raw(0, t) != self.eval(t) {
                return Err(Error::Evaluation(format!(
                    "deriv(0) differs from eval at {t}"
                )));
            }
            let dist = (t - self.iv.a).min(self.iv.b - t);
            let step = h.min(dist * 1e-3);
            for k in 1..=self.deriv_order_max.min(UNBOUNDED_ORDER - 1) {
                let exact = self.deriv_raw(k, t);
                let fd = (self.deriv_raw(k - 1, t + step) - self.deriv_raw(k - 1, t - step))
                    / (2.0 * step);
                let tol = 1e-5 * exact.abs().max(1.0);
                if !((fd - exact).abs() <= tol) {
                    return Err(Error::Evaluation(format!(
                        "{}: derivative {k} at t = {t} is {exact}, finite difference gives {fd}",
                        self.id
                    )));
                }
                // Polynomial stacks: stop once everything beyond is zero.
                if self.deriv_order_max == UNBOUNDED_ORDER && k > 8 {
                    break;
                }
            }
        }
        Ok(())
    }
}

/// `f(t) = c·(b−t)^β` on `iv`.
pub fn make_power_at_b(c: f64, beta: f64, iv: Interval) -> Result<ModelFunction> {
    if !(beta >= 0.0) || !beta.is_finite() {
        return Err(domain(format!(
            "beta must be nonnegative and finite, got {beta}"
        )));
    }
    if !c.is_finite() {
        return Err(domain(format!("coefficient must be finite, got {c}")));
    }
    let terms = vec![Term::PowerAtB { c, beta }];
    Ok(ModelFunction::from_terms(
        iv,
        terms,
        OracleClass::PowerAtB { c, beta },
        None,
    ))
}

/// Draws an exponent from `[lo, hi]` that stays at least 0.05 away from every
/// integer.
fn draw_exponent(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    loop {
        let beta: f64 = rng.random_range(lo..=hi);
        if (beta - beta.round()).abs() >= 0.05 {
            return beta;
        }
    }
}

/// `n` random functions `c₀ + Σ c_j (b−t)^{β_j}` (1 to 3 power terms) with
/// `c ∈ [−2, 2]` and `β_j ∈ [m, m+3]`, so that `f^(k)(b) = 0` for
/// `k = 1..m−1`. Deterministic in `seed`.
pub fn sample_corpus(
    setup: &FractionalSetup,
    iv: Interval,
    n: usize,
    seed: u64,
) -> Result<Vec<ModelFunction>> {
    if n == 0 {
        return Err(domain("corpus size must be at least 1"));
    }
    let m = setup.m as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let corpus = (0..n)
        .map(|_| {
            let n_terms = rng.random_range(1..=3usize);
            let mut terms = Vec::with_capacity(n_terms + 1);
            terms.push(Term::Const(rng.random_range(-2.0..=2.0)));
            for _ in 0..n_terms {
                let c = rng.random_range(-2.0..=2.0);
                let beta = draw_exponent(&mut rng, m, m + 3.0);
                terms.push(Term::PowerAtB { c, beta });
            }
            let class = OracleClass::SumOfTerms(terms.clone());
            ModelFunction::from_terms(iv, terms, class, Some(setup.m + 1))
        })
        .collect();
    Ok(corpus)
}

/// Parses the function mini-language:
///
/// ```text
/// spec := term (";" term)*
/// term := "const:" number | "powb:c=" number ",beta=" number
/// ```
///
/// Whitespace is ignored; numbers may use decimal or scientific notation.
pub fn parse_function_spec(text: &str, iv: Interval) -> Result<ModelFunction> {
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err(Error::Parse("empty function spec".into()));
    }
    let terms = compact
        .split(';')
        .map(parse_term)
        .collect::<Result<Vec<_>>>()?;
    ModelFunction::from_term_list(iv, terms).map_err(|e| Error::Parse(e.to_string()))
}

fn parse_number(s: &str, what: &str) -> Result<f64> {
    let v: f64 = s
        .parse()
        .map_err(|_| Error::Parse(format!("invalid number {s:?} for {what}")))?;
    if !v.is_finite()
        || s.chars()
            .any(|c| c.is_ascii_alphabetic() && c != 'e' && c != 'E')
    {
        return Err(Error::Parse(format!("invalid number {s:?} for {what}")));
    }
    Ok(v)
}

fn parse_term(term: &str) -> Result<Term> {
    if let Some(rest) = term.strip_prefix("const:") {
        return Ok(Term::Const(parse_number(rest, "const")?));
    }
    if let Some(rest) = term.strip_prefix("powb:c=") {
        let (c, beta) = rest
            .split_once(",beta=")
            .ok_or_else(|| Error::Parse(format!("expected ',beta=' in term {term:?}")))?;
        let c = parse_number(c, "c")?;
        let beta = parse_number(beta, "beta")?;
        if beta < 0.0 {
            return Err(Error::Parse(format!(
                "beta must be nonnegative in {term:?}"
            )));
        }
        return Ok(Term::PowerAtB { c, beta });
    }
    Err(Error::Parse(format!(
        "unknown term {term:?}; expected 'const:<c>' or 'powb:c=<c>,beta=<beta>'"
    )))
}
