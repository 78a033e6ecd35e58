//! Cross-module properties exercised through the public API only.

use fracineq_core::{
    caputo_right, eval_product_theorem, eval_z_bound, parse_function_spec, rl_integral_left,
    rl_integral_right, run_campaign, sample_corpus, taylor_reconstruct, CampaignConfig, CorpusSpec,
    DerivFn, EvalOptions, FractionalSetup, HarnessOptions, InequalityReport, Interval,
    ModelFunction, TheoremId,
};
use proptest::prelude::*;
use std::sync::Arc;

fn iv() -> Interval {
    Interval::new(-1.0, 2.0).unwrap()
}

#[test]
fn operators_are_linear() {
    let f = parse_function_spec("const:0.5;powb:c=1.5,beta=2.3", iv()).unwrap();
    let g = parse_function_spec("powb:c=-0.7,beta=3.6", iv()).unwrap();
    let h = f.scaled(2.0).unwrap().try_add(&g).unwrap();
    let setup = FractionalSetup::new(1.4).unwrap();
    let quad = EvalOptions::quadrature_only(512);
    for x in [-1.0, 0.0, 1.7] {
        for opts in [EvalOptions::default(), quad] {
            let lhs = caputo_right(&h, &setup, x, &opts).unwrap().value;
            let rhs = 2.0 * caputo_right(&f, &setup, x, &opts).unwrap().value
                + caputo_right(&g, &setup, x, &opts).unwrap().value;
            assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + rhs.abs()), "x = {x}");

            let lhs = rl_integral_right(&h, 0.8, x, &opts).unwrap().value;
            let rhs = 2.0 * rl_integral_right(&f, 0.8, x, &opts).unwrap().value
                + rl_integral_right(&g, 0.8, x, &opts).unwrap().value;
            assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + rhs.abs()), "x = {x}");
        }
    }
}

#[test]
fn closed_form_and_quadrature_agree_for_left_integral_at_b() {
    let f = parse_function_spec("const:1;powb:c=2,beta=1.5", iv()).unwrap();
    for alpha in [0.3, 1.0, 2.2] {
        let exact = rl_integral_left(&f, alpha, 2.0, &EvalOptions::default()).unwrap();
        let quad = rl_integral_left(&f, alpha, 2.0, &EvalOptions::quadrature_only(512)).unwrap();
        assert!(
            (exact.value - quad.value).abs() <= 1e-6f64.max(3.0 * quad.err_estimate),
            "alpha = {alpha}: {exact:?} vs {quad:?}"
        );
    }
}

#[test]
fn opaque_functions_use_the_quadrature_route() {
    // f(t) = exp(t) on [0, 1]: f^(k) = exp.
    let derivs: Vec<DerivFn> = (0..4).map(|_| Arc::new(f64::exp) as DerivFn).collect();
    let f = ModelFunction::opaque(Interval::unit(), "exp", derivs).unwrap();
    let setup = FractionalSetup::new(0.5).unwrap();
    let opts = EvalOptions::default();
    // No closed form is known to the library, so the Taylor identity is the check.
    for x in [0.0, 0.4, 0.9] {
        let r = taylor_reconstruct(&f, &setup, x, &opts).unwrap();
        assert!(
            (r.value - x.exp()).abs() <= 1e-5f64.max(5.0 * r.err_estimate),
            "x = {x}: {r:?}"
        );
    }
    assert!(f.check_derivative_stack(3).is_ok());
}

#[test]
fn deserialized_setups_are_validated() {
    let ok: FractionalSetup =
        serde_json::from_str(r#"{"alpha":1.5,"m":2,"p":2.0,"q":2.0}"#).unwrap();
    assert!(ok.validate().is_ok());
    let bad: FractionalSetup = serde_json::from_str(r#"{"alpha":1.5,"m":3}"#).unwrap();
    assert!(bad.validate().is_err());
    let bad: FractionalSetup =
        serde_json::from_str(r#"{"alpha":1.5,"m":2,"p":2.0,"q":3.0}"#).unwrap();
    assert!(bad.validate().is_err());
}

#[test]
fn corpus_members_satisfy_every_hypothesis() {
    for alpha in [0.5, 1.5, 2.5] {
        let setup = FractionalSetup::new(alpha).unwrap();
        for f in sample_corpus(&setup, iv(), 25, 99).unwrap() {
            assert!(f.deriv_order_max() >= setup.m);
            for k in 1..setup.m {
                assert_eq!(f.boundary(k).unwrap(), 0.0, "{}", f.id());
            }
            let back = parse_function_spec(f.id(), iv()).unwrap();
            assert_eq!(back.id(), f.id());
            f.check_derivative_stack(5).unwrap();
        }
    }
}

#[test]
fn campaign_reports_survive_json() {
    let config = CampaignConfig {
        iv: iv(),
        alphas: vec![1.2],
        ps: vec![2.5],
        theorems: fracineq_core::TheoremId::ALL.to_vec(),
        corpus: CorpusSpec::Random { size: 3 },
        seed: 5,
        opts: HarnessOptions::default(),
    };
    let out = run_campaign(&config).unwrap();
    assert_eq!(out.reports.len(), 8 * 3);
    let json = serde_json::to_string(&out).unwrap();
    let back: fracineq_core::CampaignOutcome = serde_json::from_str(&json).unwrap();
    assert_eq!(back, out);
    for r in &out.reports {
        let s = serde_json::to_string(r).unwrap();
        let again: InequalityReport = serde_json::from_str(&s).unwrap();
        assert_eq!(&again, r);
    }
}

fn power(c: f64, beta: f64) -> String {
    format!("powb:c={c},beta={beta}")
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn point_bounds_hold_for_single_powers(
        c in -3.0f64..3.0,
        frac in 0.05f64..0.95,
        extra in 0usize..3,
        alpha in 0.1f64..2.9,
    ) {
        let setup = FractionalSetup::new(alpha).unwrap();
        let beta = setup.m as f64 + extra as f64 + frac;
        let f = parse_function_spec(&power(c, beta), iv()).unwrap();
        let opts = HarnessOptions::default();
        let r = eval_z_bound(&f, &setup, TheoremId::Z1, &opts).unwrap();
        prop_assert!(r.lhs <= r.rhs + r.tol, "{r:?}");
        if alpha >= 1.0 {
            let r = eval_z_bound(&f, &setup, TheoremId::Z2, &opts).unwrap();
            prop_assert!(r.lhs <= r.rhs + r.tol, "{r:?}");
        }
    }

    #[test]
    fn product_bound_scales_quadratically(
        c in 0.2f64..2.0,
        beta in 1.05f64..3.0,
        k in 0.5f64..3.0,
    ) {
        let setup = FractionalSetup::new(0.7).unwrap();
        let f = parse_function_spec(&power(c, beta), iv()).unwrap();
        let fk = f.scaled(k).unwrap();
        let opts = HarnessOptions::default();
        let r1 = eval_product_theorem(&f, &f, &setup, TheoremId::A, &opts).unwrap();
        let rk = eval_product_theorem(&fk, &fk, &setup, TheoremId::A, &opts).unwrap();
        prop_assert!((rk.lhs - k * k * r1.lhs).abs() <= 1e-9 * rk.lhs.abs().max(1e-12));
        prop_assert!((rk.rhs - k * k * r1.rhs).abs() <= 1e-9 * rk.rhs.abs());
    }
}
