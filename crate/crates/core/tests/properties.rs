use dualmarket_core::forms::{ability_cdf, investment_cost, wage_of};
use dualmarket_core::hiring::{group_blind_threshold, posterior_qualified, BLIND_RESIDUAL_TOL};
use dualmarket_core::meanfield::{
    effort_ability_threshold, equilibrium_path, reputation_path, step_g, steady_states,
};
use dualmarket_core::{HiringRegime, ModelParams, QualType};
use proptest::prelude::*;

fn params_strategy() -> impl Strategy<Value = ModelParams> {
    (
        0.05f64..0.95,
        0.5f64..1.0,
        0.1f64..0.9,
        0.0f64..0.9,
        0.01f64..0.5,
        0.0f64..0.5,
        1.0f64..3.0,
        0.5f64..3.0,
        0.5f64..3.0,
    )
        .prop_map(|(gq, ph, f_ql, f_ul, aq, extra, alpha, ba, bb)| {
            let p_ql = ph * f_ql;
            ModelParams {
                gamma_q: gq,
                p_h: ph,
                p_ql,
                p_ul: p_ql * f_ul,
                a_q: aq,
                a_u: aq + extra,
                alpha_wage: alpha,
                beta_a: ba,
                beta_b: bb,
                ..ModelParams::default()
            }
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn recursion_stays_in_outcome_band(p in params_strategy(), g in 0.0f64..=1.0) {
        prop_assume!(p.validate().is_ok());
        let next = step_g(g, &p).unwrap();
        prop_assert!(next >= p.p_ul - 1e-12 && next <= p.p_h + 1e-12);
    }

    #[test]
    fn higher_wage_ceiling_raises_effort(p in params_strategy(), g in 0.0f64..=1.0, bump in 0.0f64..2.0) {
        prop_assume!(p.validate().is_ok());
        let richer = ModelParams { w_max: p.w_max + bump, ..p.clone() };
        for rho in QualType::ALL {
            prop_assert!(
                effort_ability_threshold(rho, g, &richer).unwrap()
                    <= effort_ability_threshold(rho, g, &p).unwrap()
            );
        }
        prop_assert!(step_g(g, &richer).unwrap() >= step_g(g, &p).unwrap() - 1e-12);
    }

    #[test]
    fn steady_states_are_fixed_and_basins_converge(p in params_strategy()) {
        prop_assume!(p.validate().is_ok());
        let ss = steady_states(&p, 1e-3, 1e-9).unwrap();
        prop_assert!(!ss.is_empty());
        for s in &ss {
            prop_assert!((step_g(s.g_star, &p).unwrap() - s.g_star).abs() <= 1e-9);
            if s.is_stable() {
                for start in [s.basin_hint.0, s.basin_hint.1] {
                    let path = equilibrium_path(start, 500, &p).unwrap();
                    prop_assert!((path[500] - s.g_star).abs() <= 1e-6);
                }
            }
        }
    }

    #[test]
    fn blind_residual_within_tolerance(q in 0.05f64..0.95, pb in 0.0f64..1.0, pw in 0.0f64..1.0, s in 0.0f64..1.0, w in 1.0f64..2.0) {
        let p = ModelParams::default();
        let sol = group_blind_threshold(q, pb, pw, s, w, &p).unwrap();
        prop_assert!(sol.residual.abs() <= BLIND_RESIDUAL_TOL);
        prop_assert_eq!(sol.thresholds.eta_hat.b, sol.thresholds.eta_hat.w);
    }
}

#[test]
fn wage_strictly_decreasing_on_grid() {
    let p = ModelParams::default();
    let w: Vec<f64> = (0..=1000).map(|i| wage_of(i as f64 / 1000.0, &p).unwrap()).collect();
    assert!(w.windows(2).all(|x| x[0] > x[1]));
}

#[test]
fn lower_reputation_costs_a_constant_multiple() {
    let p = ModelParams::default();
    for &(theta, eta) in &[(0.1, 0.3), (0.5, 1.0), (0.9, 2.5)] {
        let lo = investment_cost(theta, eta, 0.2, &p).unwrap();
        let hi = investment_cost(theta, eta, 0.8, &p).unwrap();
        assert!(lo >= hi);
        assert!((lo / hi - 1.4 / 1.1).abs() < 1e-12);
    }
}

#[test]
fn ability_cdf_endpoints() {
    for (a, b) in [(1.0, 1.0), (2.0, 5.0), (0.5, 0.5)] {
        let p = ModelParams {
            beta_a: a,
            beta_b: b,
            ..ModelParams::default()
        };
        assert!(ability_cdf(0.0, &p).unwrap().abs() < 1e-9);
        assert!((ability_cdf(1.0, &p).unwrap() - 1.0).abs() < 1e-9);
        let c: Vec<f64> = (0..=100).map(|i| ability_cdf(i as f64 / 100.0, &p).unwrap()).collect();
        assert!(c.windows(2).all(|x| x[1] >= x[0]));
    }
}

#[test]
fn posterior_ordered_in_prior() {
    for i in 1..1000 {
        let v = i as f64 / 1000.0;
        assert!(posterior_qualified(v, 0.7).unwrap() > posterior_qualified(v, 0.3).unwrap());
    }
}

#[test]
fn blind_reputations_drift_together() {
    // Without a persistent source of asymmetry the deterministic window
    // dynamics close most of the initial gap.
    let p = ModelParams::default();
    let r = reputation_path(0.3, 0.7, &HiringRegime::GroupBlind { q: 0.8 }, 200, 0.5, &p).unwrap();
    let last = r.pi[200];
    assert!((last.w - last.b).abs() < 0.05);
    assert!(last.w >= last.b);
}

#[test]
fn statdisc_reputations_stay_apart() {
    let p = ModelParams::default();
    let regime = HiringRegime::default_for("stat_disc").unwrap();
    let r = reputation_path(0.3, 0.7, &regime, 200, 0.5, &p).unwrap();
    assert!(r.pi[200].w - r.pi[200].b > 0.2);
    assert_eq!(r.parity_time, None);
}
