//! Deterministic layer: the good-worker recursion, its fixed points, and
//! window dynamics of collective reputation under a hiring regime.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{check_unit, ModelError, Result};
use crate::forms::{wage_of, AbilityDist};
use crate::hiring::{regime_thresholds, TlmThresholds};
use crate::model::{Group, PerGroup, QualType};
use crate::params::ModelParams;
use crate::regime::HiringRegime;
use crate::solve::bisect;

/// Band within which two collective reputations count as equal.
pub const PARITY_TOL: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecursionState {
    pub g: f64,
    pub wage: f64,
    pub theta_hat_q: f64,
    pub theta_hat_u: f64,
}

impl RecursionState {
    pub fn at(g: f64, p: &ModelParams) -> Result<Self> {
        Ok(Self {
            g,
            wage: wage_of(g, p)?,
            theta_hat_q: effort_ability_threshold(QualType::Q, g, p)?,
            theta_hat_u: effort_ability_threshold(QualType::U, g, p)?,
        })
    }
}

/// Ability above which a type-`rho` worker exerts high effort at `wage`.
pub fn effort_threshold_at_wage(rho: QualType, wage: f64, p: &ModelParams) -> Result<f64> {
    let premium = p.p_h - p.p_low(rho);
    if !(premium > 0.0) {
        return Err(ModelError::ZeroEffortPremium(rho));
    }
    Ok(p.effort_scale(rho) / (wage * premium))
}

pub fn effort_ability_threshold(rho: QualType, g_prev: f64, p: &ModelParams) -> Result<f64> {
    effort_threshold_at_wage(rho, wage_of(g_prev, p)?, p)
}

fn step_with(dist: &AbilityDist, g_prev: f64, p: &ModelParams) -> Result<f64> {
    let f_q = dist.cdf(effort_ability_threshold(QualType::Q, g_prev, p)?);
    let f_u = dist.cdf(effort_ability_threshold(QualType::U, g_prev, p)?);
    let mut g = p.p_h * (1.0 - f_q * p.gamma_q - f_u * (1.0 - p.gamma_q))
        + p.p_ql * f_q * p.gamma_q;
    if !p.strict_recursion {
        g += p.p_ul * f_u * (1.0 - p.gamma_q);
    }
    Ok(g.clamp(0.0, 1.0))
}

/// One step of the good-worker recursion.
pub fn step_g(g_prev: f64, p: &ModelParams) -> Result<f64> {
    check_unit("g_prev", g_prev)?;
    step_with(&AbilityDist::new(p)?, g_prev, p)
}

/// `[g0, g1, ..., g_horizon]`.
pub fn equilibrium_path(g0: f64, horizon: usize, p: &ModelParams) -> Result<Vec<f64>> {
    check_unit("g0", g0)?;
    if horizon == 0 {
        return Err(ModelError::Domain {
            what: "horizon",
            value: 0.0,
            expected: ">= 1",
        });
    }
    let dist = AbilityDist::new(p)?;
    let mut path = Vec::with_capacity(horizon + 1);
    path.push(g0);
    let mut g = g0;
    for _ in 0..horizon {
        g = step_with(&dist, g, p)?;
        path.push(g);
    }
    Ok(path)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stability {
    Stable,
    Marginal,
    Unstable,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SteadyState {
    pub g_star: f64,
    pub wage: f64,
    pub slope: f64,
    pub stability: Stability,
    /// Range of sampled starting points whose iteration converged here.
    pub basin_hint: (f64, f64),
}

impl SteadyState {
    pub fn is_stable(&self) -> bool {
        self.stability == Stability::Stable
    }
}

const SLOPE_H: f64 = 1e-6;

fn slope_at(dist: &AbilityDist, g: f64, p: &ModelParams) -> Result<f64> {
    let lo = (g - SLOPE_H).max(0.0);
    let hi = (g + SLOPE_H).min(1.0);
    Ok((step_with(dist, hi, p)? - step_with(dist, lo, p)?) / (hi - lo))
}

/// Fixed points of the recursion by grid scan plus bisection refinement.
pub fn steady_states(p: &ModelParams, grid_step: f64, tol: f64) -> Result<Vec<SteadyState>> {
    if !(grid_step > 0.0 && grid_step <= 1e-3) {
        return Err(ModelError::Domain {
            what: "grid_step",
            value: grid_step,
            expected: "(0, 1e-3]",
        });
    }
    let dist = AbilityDist::new(p)?;
    let resid = |g: f64| step_with(&dist, g, p).map(|x| x - g);
    let n = (1.0 / grid_step).ceil() as usize;
    let grid: Vec<f64> = (0..=n).map(|i| (i as f64 * grid_step).min(1.0)).collect();
    let r: Vec<f64> = grid.iter().map(|&g| resid(g)).collect::<Result<_>>()?;

    let mut roots: Vec<f64> = Vec::new();
    let mut push = |x: f64| {
        if roots.iter().all(|r| (r - x).abs() > 1e-6) {
            roots.push(x);
        }
    };
    for i in 0..grid.len() {
        if r[i] == 0.0 {
            push(grid[i]);
        } else if i + 1 < grid.len() && r[i + 1] != 0.0 && r[i].signum() != r[i + 1].signum() {
            let f = |g: f64| resid(g).unwrap_or(f64::NAN);
            push(bisect(f, grid[i], grid[i + 1], tol * 1e-3, 0.0)?);
        }
    }
    if roots.is_empty() {
        return Err(ModelError::InternalConsistency(
            "no fixed point found although the map sends [0, 1] into itself".into(),
        ));
    }

    let basins = sample_basins(&dist, &roots, p)?;
    roots
        .iter()
        .zip(basins)
        .map(|(&g_star, basin)| {
            let res = resid(g_star)?;
            if res.abs() > tol {
                return Err(ModelError::InternalConsistency(format!(
                    "fixed point {g_star} has residual {res:e}"
                )));
            }
            let slope = slope_at(&dist, g_star, p)?;
            let stability = if (slope.abs() - 1.0).abs() <= 1e-9 {
                Stability::Marginal
            } else if slope.abs() < 1.0 {
                Stability::Stable
            } else {
                Stability::Unstable
            };
            Ok(SteadyState {
                g_star,
                wage: wage_of(g_star, p)?,
                slope,
                stability,
                basin_hint: basin.unwrap_or((g_star, g_star)),
            })
        })
        .collect()
}

fn sample_basins(
    dist: &AbilityDist,
    roots: &[f64],
    p: &ModelParams,
) -> Result<Vec<Option<(f64, f64)>>> {
    let mut basins: Vec<Option<(f64, f64)>> = vec![None; roots.len()];
    for i in 0..=100 {
        let start = i as f64 / 100.0;
        let mut g = start;
        for _ in 0..5000 {
            let next = step_with(dist, g, p)?;
            let done = (next - g).abs() < 1e-13;
            g = next;
            if done {
                break;
            }
        }
        let hit = roots
            .iter()
            .enumerate()
            .map(|(k, r)| (k, (r - g).abs()))
            .min_by(|a, b| a.1.total_cmp(&b.1));
        if let Some((k, d)) = hit {
            if d <= 1e-6 {
                let b = basins[k].get_or_insert((start, start));
                b.0 = b.0.min(start);
                b.1 = b.1.max(start);
            }
        }
    }
    Ok(basins)
}

/// Share of a group that is hired under `cutoff` and produces a good outcome,
/// with effort decided by the cutoff rule at `wage`.
pub fn cohort_good_share(cutoff: f64, wage: f64, p: &ModelParams, dist: &AbilityDist) -> Result<f64> {
    let s_c = dist.survival(cutoff);
    let mut total = 0.0;
    for (rho, weight) in [(QualType::Q, p.gamma_q), (QualType::U, 1.0 - p.gamma_q)] {
        let th = effort_threshold_at_wage(rho, wage, p)?;
        let s_eff = dist.survival(cutoff.max(th));
        total += weight * (p.p_h * s_eff + p.p_low(rho) * (s_c - s_eff));
    }
    Ok(total)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepPath {
    pub pi: Vec<PerGroup<f64>>,
    pub g: Vec<f64>,
    pub thresholds: Vec<TlmThresholds>,
    pub parity_time: Option<usize>,
}

/// First index at which the initially lower reputation has caught up to
/// within `tol`. `Some(0)` when the series start level.
pub fn parity_time(series: &[PerGroup<f64>], tol: f64) -> Option<usize> {
    let first = series.first()?;
    let sign = (first.w - first.b).signum();
    series
        .iter()
        .position(|pi| sign * (pi.w - pi.b) <= tol || (pi.w - pi.b).abs() <= tol)
}

/// Deterministic collective-reputation dynamics. Each period a group's new
/// observation is the share of its entering cohort that is hired and turns
/// out good; the reputation is the average over the last `tau` observations.
pub fn reputation_path(
    pi_b0: f64,
    pi_w0: f64,
    regime: &HiringRegime,
    horizon: usize,
    g0: f64,
    p: &ModelParams,
) -> Result<RepPath> {
    check_unit("pi_b0", pi_b0)?;
    check_unit("pi_w0", pi_w0)?;
    regime.validate()?;
    let dist = AbilityDist::new(p)?;
    let g = equilibrium_path(g0, horizon.max(1), p)?;
    let tau = p.tau.max(1) as usize;
    let mut windows = PerGroup::new(
        VecDeque::from(vec![pi_b0; tau]),
        VecDeque::from(vec![pi_w0; tau]),
    );
    let mut pi = vec![PerGroup::new(pi_b0, pi_w0)];
    let mut thresholds = Vec::with_capacity(horizon);
    for t in 1..=horizon {
        let wage = wage_of(g[t - 1], p)?;
        let cur = pi[t - 1];
        let th = regime_thresholds(regime, cur, wage, p)?;
        let next = PerGroup::from_fn(|grp: Group| {
            let obs = if th.hire_none[grp] {
                Ok(0.0)
            } else {
                cohort_good_share(th.theta_hat[grp], wage, p, &dist)
            };
            obs.map(|o| {
                let w = &mut windows[grp];
                w.pop_front();
                w.push_back(o);
                w.iter().sum::<f64>() / w.len() as f64
            })
        });
        pi.push(PerGroup::new(next.b?, next.w?));
        thresholds.push(th);
    }
    let g = g[..=horizon].to_vec();
    Ok(RepPath {
        parity_time: parity_time(&pi, PARITY_TOL),
        pi,
        g,
        thresholds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn golden() -> ModelParams {
        ModelParams::default()
    }

    /// Parameters whose effort cutoffs sit far below any ability.
    fn saturated() -> ModelParams {
        ModelParams {
            a_q: 1e-15,
            a_u: 1e-15,
            ..golden()
        }
    }

    #[test]
    fn effort_threshold_examples() {
        let p = golden();
        assert_abs_diff_eq!(
            effort_threshold_at_wage(QualType::Q, 1.25, &p).unwrap(),
            0.2,
            epsilon = 1e-12
        );
        let p_eq = ModelParams {
            a_u: 0.1,
            p_ul: 0.5,
            p_ql: 0.5,
            ..golden()
        };
        // Equal premiums: cost ordering alone drives the cutoffs.
        let q = effort_threshold_at_wage(QualType::Q, 1.5, &p_eq).unwrap();
        let u = effort_threshold_at_wage(QualType::U, 1.5, &p_eq).unwrap();
        assert!(u >= q);
    }

    #[test]
    fn zero_premium_is_an_error() {
        let mut p = golden();
        p.p_ql = p.p_h;
        assert!(matches!(
            effort_threshold_at_wage(QualType::Q, 1.0, &p),
            Err(ModelError::ZeroEffortPremium(QualType::Q))
        ));
    }

    #[test]
    fn step_saturation_cases() {
        assert_abs_diff_eq!(step_g(0.3, &saturated()).unwrap(), 0.9, epsilon = 1e-12);
        let none = ModelParams {
            a_q: 100.0,
            a_u: 100.0,
            ..golden()
        };
        assert_abs_diff_eq!(step_g(0.3, &none).unwrap(), 0.38, epsilon = 1e-12);
    }

    #[test]
    fn step_golden_value() {
        // Frozen from an independent straight-line evaluation of the recursion.
        assert_abs_diff_eq!(step_g(0.5, &golden()).unwrap(), 0.806666666666667, epsilon = 1e-12);
    }

    #[test]
    fn strict_recursion_drops_unqualified_low_effort_term() {
        let none = ModelParams {
            a_q: 100.0,
            a_u: 100.0,
            strict_recursion: true,
            ..golden()
        };
        assert_abs_diff_eq!(step_g(0.3, &none).unwrap(), 0.3, epsilon = 1e-12);
    }

    #[test]
    fn path_shapes() {
        let p = golden();
        let path = equilibrium_path(0.5, 1, &p).unwrap();
        assert_eq!(path, vec![0.5, step_g(0.5, &p).unwrap()]);
        let sat = equilibrium_path(0.1, 5, &saturated()).unwrap();
        assert!(sat[1..].iter().all(|g| (g - 0.9).abs() < 1e-12));
        let ss = steady_states(&p, 1e-3, 1e-9).unwrap();
        let fixed = equilibrium_path(ss[0].g_star, 10, &p).unwrap();
        assert!(fixed.iter().all(|g| (g - ss[0].g_star).abs() < 1e-9));
        assert!(equilibrium_path(0.5, 0, &p).is_err());
    }

    #[test]
    fn steady_states_saturated_and_idle() {
        let ss = steady_states(&saturated(), 1e-3, 1e-9).unwrap();
        assert_eq!(ss.len(), 1);
        assert_abs_diff_eq!(ss[0].g_star, 0.9, epsilon = 1e-9);
        assert!(ss[0].is_stable());
        let none = ModelParams {
            a_q: 100.0,
            a_u: 100.0,
            ..golden()
        };
        let ss = steady_states(&none, 1e-3, 1e-9).unwrap();
        assert_eq!(ss.len(), 1);
        assert_abs_diff_eq!(ss[0].g_star, 0.38, epsilon = 1e-9);
        assert!(ss[0].is_stable());
    }

    #[test]
    fn steady_state_golden_matches_dense_scan() {
        let p = golden();
        let ss = steady_states(&p, 1e-3, 1e-9).unwrap();
        assert_eq!(ss.len(), 1);
        let g = ss[0].g_star;
        assert!((step_g(g, &p).unwrap() - g).abs() <= 1e-9);
        // Dense scan: sign change between 0.78479 and 0.78480.
        assert!(g > 0.78479 && g < 0.78480, "{g}");
        assert_eq!(ss[0].basin_hint, (0.0, 1.0));
        assert!(steady_states(&p, 1e-2, 1e-9).is_err());
    }

    #[test]
    fn reputation_equal_start_is_flat() {
        let r = reputation_path(0.5, 0.5, &HiringRegime::GroupFair { ell: 0.8 }, 20, 0.5, &golden())
            .unwrap();
        assert_eq!(r.parity_time, Some(0));
        assert!(r.pi.iter().all(|x| x.b == x.w));
    }

    #[test]
    fn reputation_unit_window_jumps_in_one_period() {
        let p = ModelParams { tau: 1, ..golden() };
        let r = reputation_path(0.3, 0.7, &HiringRegime::GroupFair { ell: 0.8 }, 10, 0.5, &p).unwrap();
        assert_eq!(r.parity_time, Some(1));
        assert_eq!(r.pi[1].b, r.pi[1].w);
    }

    #[test]
    fn reputation_fair_golden_rises_to_parity() {
        let r = reputation_path(0.3, 0.7, &HiringRegime::GroupFair { ell: 0.8 }, 50, 0.5, &golden())
            .unwrap();
        for w in r.pi.windows(2).filter(|w| w[0].b < w[0].w) {
            assert!(w[1].b >= w[0].b);
        }
        // Window of five: the seed fully leaves the window after five periods.
        assert_eq!(r.parity_time, Some(5));
    }
}
