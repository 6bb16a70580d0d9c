use dualmarket_core::analysis::{classify_equilibrium, parity_audit, EquilibriumKind, TailWindow};
use dualmarket_core::hiring::group_blind_threshold;
use dualmarket_core::meanfield::equilibrium_path;
use dualmarket_core::sim::{simulate, SimOptions};
use dualmarket_core::{HiringRegime, ModelParams, PerGroup};

fn params(n: u64) -> ModelParams {
    ModelParams {
        n,
        ..ModelParams::default()
    }
}

fn gap_opts() -> SimOptions {
    SimOptions {
        pi0: PerGroup::new(0.3, 0.7),
        oscillation: false,
    }
}

#[test]
fn agent_tracks_mean_field() {
    let p = params(5_000);
    let out = simulate(&p, &HiringRegime::GroupFair { ell: 0.8 }, 120, gap_opts()).unwrap();
    let mf = equilibrium_path(out.records[0].g_plm, 120, &p).unwrap();
    let dev = (50..=120)
        .map(|t| (out.records[t].g_plm - mf[t]).abs())
        .sum::<f64>()
        / 71.0;
    assert!(dev < 0.02, "{dev}");
}

#[test]
fn same_seed_same_run_other_seed_differs() {
    let p = params(1_000);
    let regime = HiringRegime::GroupBlind { q: 0.8 };
    let a = simulate(&p, &regime, 30, gap_opts()).unwrap();
    let b = simulate(&p, &regime, 30, gap_opts()).unwrap();
    assert_eq!(a, b);
    let q = ModelParams { seed: 7, ..p };
    let c = simulate(&q, &regime, 30, gap_opts()).unwrap();
    assert_ne!(a.records, c.records);
}

#[test]
fn population_and_flow_balance() {
    let p = params(10_000);
    let out = simulate(&p, &HiringRegime::GroupFair { ell: 0.8 }, 150, gap_opts()).unwrap();
    let band = 2.0 / (p.n as f64).sqrt();
    for r in &out.records[40..] {
        assert_eq!(r.tlm_size + r.plm_size, p.n);
        let share = r.tlm_size as f64 / p.n as f64;
        assert!((share - p.m).abs() <= band, "t={} share={share}", r.t);
    }
}

#[test]
fn fair_parity_bound_every_period() {
    let out = simulate(&params(3_000), &HiringRegime::GroupFair { ell: 0.7 }, 100, gap_opts()).unwrap();
    let audit = parity_audit(&out.tallies).unwrap();
    assert!(audit.max_worker_deviation <= 1.0);
    for tally in &out.tallies {
        let hired = tally.hires.b + tally.hires.w;
        if hired > 0 {
            let share_b = tally.applicants.b as f64 / (tally.applicants.b + tally.applicants.w) as f64;
            let dev = (tally.hires.b as f64 / hired as f64 - share_b).abs();
            assert!(dev <= 1.0 / hired as f64 + 1e-12);
        }
    }
}

#[test]
fn blind_hiring_skews_toward_the_better_reputed() {
    let p = params(20_000);
    let out = simulate(&p, &HiringRegime::GroupBlind { q: 0.5 }, 0, gap_opts()).unwrap();
    let audit = parity_audit(&out.tallies).unwrap();
    let sol = group_blind_threshold(0.5, 0.3, 0.7, p.sigma_b, out.records[0].wage, &p).unwrap();
    let (sb, sw) = (1.0 - sol.thresholds.theta_hat.b, 1.0 - sol.thresholds.theta_hat.w);
    let predicted = (p.sigma_b * sb / (p.sigma_b * sb + (1.0 - p.sigma_b) * sw) - p.sigma_b).abs();
    assert!(predicted > 0.02);
    assert!((audit.max_share_deviation - predicted).abs() < 0.015, "{audit:?} {predicted}");
}

#[test]
fn equal_start_is_symmetric_under_every_regime() {
    let p = params(4_000);
    let opts = SimOptions::default();
    for regime in [
        HiringRegime::GroupFair { ell: 0.8 },
        HiringRegime::GroupBlind { q: 0.8 },
        HiringRegime::StatDisc {
            xi_b: 0.6,
            xi_w: 0.6,
            cutoff: 0.5,
            prior_update: Default::default(),
        },
    ] {
        let out = simulate(&p, &regime, 100, opts).unwrap();
        let r = classify_equilibrium(&out.records, Some(&out.thresholds), TailWindow::default()).unwrap();
        assert_eq!(r.kind, EquilibriumKind::Symmetric, "{}", regime.name());
    }
}
