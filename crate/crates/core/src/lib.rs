//! Numerical right Caputo fractional calculus and Ostrowski-type inequality
//! verification.
//!
//! The crate is organised bottom-up:
//!
//! * [`special`] – Gamma and Beta functions.
//! * [`model`] – test functions with analytic derivative stacks, random
//!   corpora and the textual function mini-language.
//! * [`quadrature`] – product integration for weakly singular kernels,
//!   composite Gauss–Legendre rules and L¹/L^q/L^∞ norms.
//! * [`fractional`] – Riemann–Liouville integrals, the right Caputo
//!   derivative, the right Caputo Taylor reconstruction and closed-form
//!   oracles.
//! * [`harness`] – left/right-hand sides of the Ostrowski-type bounds,
//!   verdicts with propagated tolerances, and seeded campaigns.

pub mod error;
pub mod fractional;
pub mod harness;
pub mod model;
pub mod quadrature;
pub mod special;

pub use error::{Error, Result};
pub use fractional::{
    caputo_oracle_power, caputo_right, convergence_table, rl_integral_left, rl_integral_right,
    taylor_reconstruct, ConvergenceRow, EvalOptions, FractionalEvaluation, Method, Operator,
};
pub use harness::{
    a2_discrepancy_factor, eval_classical_ostrowski, eval_product_theorem, eval_z_bound,
    run_campaign, A2Pair, CampaignConfig, CampaignOutcome, CampaignSummary, CorpusSpec,
    HarnessOptions, InequalityReport, TheoremId, TheoremSummary, Verdict,
};
pub use model::{
    make_power_at_b, parse_function_spec, sample_corpus, DerivFn, FractionalSetup, Interval,
    ModelFunction, OracleClass, Term,
};
pub use quadrature::{
    norm, regular_integral, singular_integral, NormKind, ProductQuadratureRule, QuadResult,
    DEFAULT_PANELS,
};
pub use special::{beta, gamma, ln_gamma, PositiveReal};
