//! Quadrature for weakly singular kernels, smooth integrals and norms.
//!
//! Singular integrals `∫_x^ub (t−x)^(μ−1) φ(t) dt` use product integration:
//! `φ` is replaced by its piecewise-linear interpolant on a mesh graded toward
//! `x`, and each panel is integrated exactly against the kernel. Regular
//! integrals use composite 8-point Gauss–Legendre. Every result carries a
//! two-grid error estimate `|I(N) − I(N/2)|`.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::model::Interval;

/// Panel count used by all operator evaluations unless overridden.
pub const DEFAULT_PANELS: usize = 512;

const GAUSS_POINTS: usize = 8;
const LINF_UNIFORM: usize = 4096;
const LINF_GEOMETRIC: usize = 64;
const NORM_GRADING: f64 = 2.0;

/// Integral value with an absolute error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadResult {
    pub value: f64,
    pub err_estimate: f64,
}

impl QuadResult {
    pub fn exact(value: f64) -> Self {
        Self {
            value,
            err_estimate: 0.0,
        }
    }

    fn two_grid(fine: f64, coarse: f64) -> Self {
        Self {
            value: fine,
            err_estimate: (fine - coarse).abs(),
        }
    }
}

/// Which norm [`norm`] computes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum NormKind {
    Linf,
    L1,
    Lq(f64),
}

/// Product-integration rule for `∫_lower^upper (t−lower)^(μ−1) φ(t) dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductQuadratureRule {
    lower: f64,
    upper: f64,
    mu: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl ProductQuadratureRule {
    /// Mesh exponent `γ = max(1, 2/μ)`, capped at 4.
    pub fn grading(mu: f64) -> f64 {
        (2.0 / mu).clamp(1.0, 4.0)
    }

    pub fn new(lower: f64, upper: f64, mu: f64, n_panels: usize) -> Result<Self> {
        if !(mu > 0.0) || !mu.is_finite() {
            return Err(domain(format!(
                "kernel exponent mu must be positive, got {mu}"
            )));
        }
        if !(lower < upper) || !lower.is_finite() || !upper.is_finite() {
            return Err(domain(format!(
                "singular integral needs lower < upper, got [{lower}, {upper}]"
            )));
        }
        if n_panels == 0 {
            return Err(domain("n_panels must be positive"));
        }
        let gamma = Self::grading(mu);
        let len = upper - lower;
        let nodes: Vec<f64> = (0..=n_panels)
            .map(|j| {
                if j == n_panels {
                    upper
                } else {
                    lower + len * (j as f64 / n_panels as f64).powf(gamma)
                }
            })
            .collect();
        let mut weights = vec![0.0; n_panels + 1];
        for j in 0..n_panels {
            let (wl, wr) = panel_weights(nodes[j] - lower, nodes[j + 1] - lower, mu);
            weights[j] += wl;
            weights[j + 1] += wr;
        }
        Ok(Self {
            lower,
            upper,
            mu,
            nodes,
            weights,
        })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn n_panels(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn bounds(&self) -> (f64, f64) {
        (self.lower, self.upper)
    }

    /// Applies the rule to integrand values sampled at [`Self::nodes`].
    pub fn apply(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.weights.len());
        self.weights.iter().zip(values).map(|(w, v)| w * v).sum()
    }
}

/// Exact kernel moments of the two hat functions on the panel `[s0, s1]`,
/// with `s` measured from the singular point:
/// `∫ s^(μ−1)(s1−s)/h ds` and `∫ s^(μ−1)(s−s0)/h ds`.
fn panel_weights(s0: f64, s1: f64, mu: f64) -> (f64, f64) {
    let h = s1 - s0;
    if s0 == 0.0 {
        let hm = h.powf(mu);
        return (hm / (mu * (mu + 1.0)), hm / (mu + 1.0));
    }
    let r = h / s0;
    let scale = h * s0.powf(mu - 1.0);
    let (left, right) = if r < 0.05 {
        // Binomial series of (1 + r u)^(μ−1); terms shrink at least like r^k.
        let mut coeff = 1.0;
        let mut rk = 1.0;
        let (mut left, mut right) = (0.0, 0.0);
        for k in 0..24 {
            let kf = k as f64;
            left += coeff * rk / ((kf + 1.0) * (kf + 2.0));
            right += coeff * rk / (kf + 2.0);
            coeff *= (mu - 1.0 - kf) / (kf + 1.0);
            rk *= r;
            if coeff == 0.0 {
                break;
            }
        }
        (left, right)
    } else {
        let l1p = r.ln_1p();
        let a = (mu * l1p).exp_m1() / mu;
        let b = ((mu + 1.0) * l1p).exp_m1() / (mu + 1.0);
        let r2 = r * r;
        (((1.0 + r) * a - b) / r2, (b - a) / r2)
    };
    (scale * left, scale * right)
}

fn sample(phi: &impl Fn(f64) -> f64, nodes: &[f64]) -> Result<Vec<f64>> {
    nodes
        .iter()
        .map(|&t| {
            let v = phi(t);
            if v.is_finite() {
                Ok(v)
            } else {
                Err(Error::Evaluation(format!("integrand is {v} at t = {t}")))
            }
        })
        .collect()
}

/// `∫_x^ub (t−x)^(μ−1) φ(t) dt` by product integration on a graded mesh.
///
/// `n_panels` must be at least 2; the error estimate compares against the
/// rule with half as many panels.
pub fn singular_integral(
    phi: impl Fn(f64) -> f64,
    x: f64,
    ub: f64,
    mu: f64,
    n_panels: usize,
) -> Result<QuadResult> {
    if n_panels < 2 {
        return Err(domain("n_panels must be at least 2"));
    }
    let fine = ProductQuadratureRule::new(x, ub, mu, n_panels)?;
    let coarse = ProductQuadratureRule::new(x, ub, mu, n_panels / 2)?;
    let values = sample(&phi, fine.nodes())?;
    let coarse_values = if n_panels.is_multiple_of(2) {
        values.iter().step_by(2).copied().collect()
    } else {
        sample(&phi, coarse.nodes())?
    };
    Ok(QuadResult::two_grid(
        fine.apply(&values),
        coarse.apply(&coarse_values),
    ))
}

struct GaussLegendre {
    nodes: [f64; GAUSS_POINTS],
    weights: [f64; GAUSS_POINTS],
}

/// Nodes and weights on [-1, 1] by Newton iteration on P_n.
fn gauss_legendre() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = GAUSS_POINTS;
        let mut nodes = [0.0; GAUSS_POINTS];
        let mut weights = [0.0; GAUSS_POINTS];
        for i in 0..n {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let kf = k as f64;
                    let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            nodes[i] = x;
            weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        GaussLegendre { nodes, weights }
    })
}

fn composite_gauss(phi: &impl Fn(f64) -> f64, mesh: &[f64]) -> Result<f64> {
    let gl = gauss_legendre();
    let mut total = 0.0;
    for w in mesh.windows(2) {
        let half = 0.5 * (w[1] - w[0]);
        let mid = 0.5 * (w[1] + w[0]);
        let mut panel = 0.0;
        for (x, wt) in gl.nodes.iter().zip(&gl.weights) {
            let t = mid + half * x;
            let v = phi(t);
            if !v.is_finite() {
                return Err(Error::Evaluation(format!("integrand is {v} at t = {t}")));
            }
            panel += wt * v;
        }
        total += half * panel;
    }
    Ok(total)
}

fn uniform_mesh(lb: f64, ub: f64, n: usize) -> Vec<f64> {
    (0..=n)
        .map(|j| {
            if j == n {
                ub
            } else {
                lb + (ub - lb) * j as f64 / n as f64
            }
        })
        .collect()
}

/// Mesh on `[lb, ub]` graded symmetrically toward both ends with the given
/// exponent.
fn two_sided_mesh(lb: f64, ub: f64, n: usize, exponent: f64) -> Vec<f64> {
    let len = ub - lb;
    (0..=n)
        .map(|j| {
            if j == n {
                return ub;
            }
            let s = j as f64 / n as f64;
            let g = if s <= 0.5 {
                0.5 * (2.0 * s).powf(exponent)
            } else {
                1.0 - 0.5 * (2.0 * (1.0 - s)).powf(exponent)
            };
            lb + len * g
        })
        .collect()
}

fn check_range(lb: f64, ub: f64, n_panels: usize) -> Result<()> {
    if !(lb < ub) || !lb.is_finite() || !ub.is_finite() {
        return Err(domain(format!("integral needs lb < ub, got [{lb}, {ub}]")));
    }
    if n_panels < 2 {
        return Err(domain("n_panels must be at least 2"));
    }
    Ok(())
}

/// `∫_lb^ub φ` by composite Gauss–Legendre on `n_panels` uniform panels.
pub fn regular_integral(
    phi: impl Fn(f64) -> f64,
    lb: f64,
    ub: f64,
    n_panels: usize,
) -> Result<QuadResult> {
    check_range(lb, ub, n_panels)?;
    let fine = composite_gauss(&phi, &uniform_mesh(lb, ub, n_panels))?;
    let coarse = composite_gauss(&phi, &uniform_mesh(lb, ub, n_panels / 2))?;
    Ok(QuadResult::two_grid(fine, coarse))
}

/// `∫_lb^ub φ` by composite Gauss–Legendre on a mesh graded toward both ends
/// (exponent 2). Suited to integrands whose derivatives blow up at an end.
pub fn graded_integral(
    phi: impl Fn(f64) -> f64,
    lb: f64,
    ub: f64,
    n_panels: usize,
) -> Result<QuadResult> {
    check_range(lb, ub, n_panels)?;
    let fine = composite_gauss(&phi, &two_sided_mesh(lb, ub, n_panels, NORM_GRADING))?;
    let coarse = composite_gauss(&phi, &two_sided_mesh(lb, ub, n_panels / 2, NORM_GRADING))?;
    Ok(QuadResult::two_grid(fine, coarse))
}

/// Sample points for the sup norm: a uniform grid plus geometric clusters
/// approaching each endpoint. The flag marks points kept by the coarse pass.
fn linf_points(iv: Interval) -> Vec<(f64, bool)> {
    let len = iv.len();
    let mut pts = Vec::with_capacity(LINF_UNIFORM + 2 * LINF_GEOMETRIC);
    for i in 0..LINF_UNIFORM {
        let t = if i == LINF_UNIFORM - 1 {
            iv.b
        } else {
            iv.a + len * i as f64 / (LINF_UNIFORM - 1) as f64
        };
        pts.push((t, i % 2 == 0 || i == LINF_UNIFORM - 1));
    }
    // Distances from (b−a)·1e-3 down to (b−a)·1e-12.
    let ratio = 1e-9f64.powf(1.0 / (LINF_GEOMETRIC - 1) as f64);
    let mut d = len * 1e-3;
    for k in 0..LINF_GEOMETRIC {
        pts.push((iv.a + d, k % 2 == 0));
        pts.push((iv.b - d, k % 2 == 0));
        d *= ratio;
    }
    pts
}

/// L^∞, L¹ or L^q norm of `φ` on `iv`.
///
/// L^∞ is a maximum over 4096 uniform points and 64 geometrically spaced
/// points near each endpoint; a non-finite value exactly at an endpoint is
/// skipped, anywhere else it is an error. L¹ and L^q integrate on a mesh
/// graded toward both endpoints.
pub fn norm(
    phi: impl Fn(f64) -> f64,
    iv: Interval,
    kind: NormKind,
    n_panels: usize,
) -> Result<QuadResult> {
    match kind {
        NormKind::Linf => {
            let (mut fine, mut coarse) = (0.0f64, 0.0f64);
            for (t, in_coarse) in linf_points(iv) {
                let v = phi(t).abs();
                if !v.is_finite() {
                    if t == iv.a || t == iv.b {
                        continue;
                    }
                    return Err(Error::Evaluation(format!("function is {v} at t = {t}")));
                }
                fine = fine.max(v);
                if in_coarse {
                    coarse = coarse.max(v);
                }
            }
            Ok(QuadResult::two_grid(fine, coarse))
        }
        NormKind::L1 => graded_integral(|t| phi(t).abs(), iv.a, iv.b, n_panels),
        NormKind::Lq(q) => {
            if !(q > 1.0) || !q.is_finite() {
                return Err(domain(format!("L^q norm needs q > 1, got {q}")));
            }
            let r = graded_integral(|t| phi(t).abs().powf(q), iv.a, iv.b, n_panels)?;
            let value = r.value.max(0.0).powf(1.0 / q);
            let err = if r.value > 0.0 {
                value / (q * r.value) * r.err_estimate
            } else {
                r.err_estimate.powf(1.0 / q)
            };
            Ok(QuadResult {
                value,
                err_estimate: err,
            })
        }
    }
}
