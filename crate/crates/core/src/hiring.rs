//! TLM hiring thresholds for the three regimes, plus the PLM reputation rule.
//!
//! Thresholds are expressed twice: as an investment level `eta_hat` (what the
//! firm posts) and as the ability cutoff `theta_hat` that level implies for
//! each group given its collective reputation and the current wage. Workers
//! invest at the posted level iff their ability is at least the cutoff.

use serde::{Deserialize, Serialize};

use crate::error::{check_unit, ModelError, Result};
use crate::forms::{ability_for_investment, signal_density, AbilityDist};
use crate::model::{Group, PerGroup, QualType};
use crate::params::ModelParams;
use crate::regime::{HiringRegime, PriorUpdate};
use crate::solve::bisect;

/// Residual tolerance of the group-blind threshold solver.
pub const BLIND_RESIDUAL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TlmThresholds {
    pub eta_hat: PerGroup<f64>,
    pub theta_hat: PerGroup<f64>,
    /// Set when the regime cannot hire anyone from the group.
    pub hire_none: PerGroup<bool>,
}

impl TlmThresholds {
    fn from_etas(eta_hat: PerGroup<f64>, pi: PerGroup<f64>, wage: f64, p: &ModelParams) -> Self {
        Self {
            theta_hat: PerGroup::from_fn(|g| ability_for_investment(eta_hat[g], pi[g], wage, p)),
            eta_hat,
            hire_none: PerGroup::new(false, false),
        }
    }

    /// Share of group `g` whose ability clears its cutoff.
    pub fn hired_share(&self, g: Group, dist: &AbilityDist) -> f64 {
        if self.hire_none[g] {
            0.0
        } else {
            dist.survival(self.theta_hat[g])
        }
    }
}

fn check_wage(wage: f64) -> Result<()> {
    if wage > 0.0 && wage.is_finite() {
        Ok(())
    } else {
        Err(ModelError::Domain {
            what: "wage",
            value: wage,
            expected: "> 0",
        })
    }
}

/// Group-fair thresholds: each group's top `ell` share clears its own cutoff.
pub fn group_fair_thresholds(
    ell: f64,
    pi_b: f64,
    pi_w: f64,
    wage: f64,
    p: &ModelParams,
) -> Result<TlmThresholds> {
    if ell == 0.0 {
        return Err(ModelError::DegenerateRegime(
            "group-fair hiring share ell = 0 hires nobody".into(),
        ));
    }
    check_unit("ell", ell)?;
    check_unit("pi_b", pi_b)?;
    check_unit("pi_w", pi_w)?;
    check_wage(wage)?;
    let dist = AbilityDist::new(p)?;
    let theta = dist.quantile(1.0 - ell)?;
    let pi = PerGroup::new(pi_b, pi_w);
    let eta_hat = PerGroup::from_fn(|g| crate::forms::investment_capacity(theta, pi[g], wage, p));
    Ok(TlmThresholds {
        eta_hat,
        theta_hat: PerGroup::new(theta, theta),
        hire_none: PerGroup::new(false, false),
    })
}

/// Solution of the group-blind threshold equation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlindSolution {
    pub thresholds: TlmThresholds,
    pub eta: f64,
    pub residual: f64,
}

/// Hired share under a single posted investment level `eta`.
pub fn blind_hired_share(
    eta: f64,
    pi: PerGroup<f64>,
    sigma_b: f64,
    wage: f64,
    p: &ModelParams,
    dist: &AbilityDist,
) -> f64 {
    let s = |g: Group| dist.survival(ability_for_investment(eta, pi[g], wage, p));
    (1.0 - sigma_b) * s(Group::W) + sigma_b * s(Group::B)
}

/// Group-blind threshold: the single `eta` with
/// `q = (1 - sigma_b)(1 - F(c_W^-1(eta))) + sigma_b (1 - F(c_B^-1(eta)))`.
pub fn group_blind_threshold(
    q: f64,
    pi_b: f64,
    pi_w: f64,
    sigma_b: f64,
    wage: f64,
    p: &ModelParams,
) -> Result<BlindSolution> {
    if !(q > 0.0 && q < 1.0) {
        return Err(ModelError::Domain {
            what: "q",
            value: q,
            expected: "(0, 1)",
        });
    }
    check_unit("pi_b", pi_b)?;
    check_unit("pi_w", pi_w)?;
    check_unit("sigma_b", sigma_b)?;
    check_wage(wage)?;
    let dist = AbilityDist::new(p)?;
    let pi = PerGroup::new(pi_b, pi_w);
    let k_min = crate::forms::reputation_multiplier(pi_b.max(pi_w), p);
    // Above wage / k_min no ability in (0, 1) is willing to invest.
    let hi = wage / k_min;
    let resid = |eta: f64| blind_hired_share(eta, pi, sigma_b, wage, p, &dist) - q;
    let eta = bisect(resid, 0.0, hi, BLIND_RESIDUAL_TOL * 0.01, 0.0)?;
    let residual = resid(eta);
    if residual.abs() > BLIND_RESIDUAL_TOL {
        return Err(ModelError::InternalConsistency(format!(
            "group-blind residual {residual:e} above tolerance at eta = {eta}"
        )));
    }
    Ok(BlindSolution {
        thresholds: TlmThresholds::from_etas(PerGroup::new(eta, eta), pi, wage, p),
        eta,
        residual,
    })
}

/// Firm posterior that a worker with signal `v` from a group with prior `xi`
/// is qualified.
pub fn posterior_qualified(v: f64, xi: f64) -> Result<f64> {
    check_unit("xi", xi)?;
    let ps = signal_density(v, QualType::Q)?;
    let pu = signal_density(v, QualType::U)?;
    let num = ps * xi;
    let den = num + (1.0 - xi) * pu;
    if den == 0.0 {
        // Only reachable with a degenerate prior at an endpoint signal.
        return Ok(xi);
    }
    Ok(num / den)
}

/// Smallest signal whose posterior reaches `cutoff`, or `None` when even the
/// strongest signal falls short.
pub fn signal_cutoff(xi: f64, cutoff: f64) -> Result<Option<f64>> {
    check_unit("cutoff", cutoff)?;
    let f = |v: f64| posterior_qualified(v, xi).map(|x| x - cutoff);
    if f(1.0)? < 0.0 {
        return Ok(None);
    }
    if f(0.0)? >= 0.0 {
        return Ok(Some(0.0));
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    // Invariant: f(lo) < 0 <= f(hi).
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid)? >= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(hi))
}

/// Stat-disc thresholds. The signal is the investment level rescaled by the
/// current wage, which bounds every worker's affordable investment.
pub fn statdisc_thresholds(
    regime: &HiringRegime,
    pi_b: f64,
    pi_w: f64,
    wage: f64,
    p: &ModelParams,
) -> Result<TlmThresholds> {
    let HiringRegime::StatDisc {
        xi_b,
        xi_w,
        cutoff,
        prior_update,
    } = *regime
    else {
        return Err(ModelError::Mismatch(format!(
            "statdisc_thresholds called with {} regime",
            regime.name()
        )));
    };
    check_wage(wage)?;
    let pi = PerGroup::new(pi_b, pi_w);
    let priors = match prior_update {
        PriorUpdate::Static => PerGroup::new(xi_b, xi_w),
        PriorUpdate::EmpiricalWindow => pi,
    };
    let mut out = TlmThresholds {
        eta_hat: PerGroup::new(0.0, 0.0),
        theta_hat: PerGroup::new(0.0, 0.0),
        hire_none: PerGroup::new(false, false),
    };
    for g in Group::ALL {
        match signal_cutoff(priors[g], cutoff)? {
            Some(v) => {
                out.eta_hat[g] = v * wage;
                out.theta_hat[g] = ability_for_investment(v * wage, pi[g], wage, p);
            }
            None => {
                out.eta_hat[g] = f64::INFINITY;
                out.theta_hat[g] = f64::INFINITY;
                out.hire_none[g] = true;
            }
        }
    }
    Ok(out)
}

/// Analytic thresholds of any regime at the given reputations and wage.
pub fn regime_thresholds(
    regime: &HiringRegime,
    pi: PerGroup<f64>,
    wage: f64,
    p: &ModelParams,
) -> Result<TlmThresholds> {
    match *regime {
        HiringRegime::GroupFair { ell } => group_fair_thresholds(ell, pi.b, pi.w, wage, p),
        HiringRegime::GroupBlind { q } if q >= 1.0 => Ok(TlmThresholds {
            eta_hat: PerGroup::new(0.0, 0.0),
            theta_hat: PerGroup::new(0.0, 0.0),
            hire_none: PerGroup::new(false, false),
        }),
        HiringRegime::GroupBlind { q } => {
            group_blind_threshold(q, pi.b, pi.w, p.sigma_b, wage, p).map(|s| s.thresholds)
        }
        HiringRegime::StatDisc { .. } => statdisc_thresholds(regime, pi.b, pi.w, wage, p),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlmThreshold {
    pub pi_hat: f64,
    pub delta_slack: f64,
}

/// PLM reputation cutoff `p_H - delta0 (1 - delta)`, floored at zero.
pub fn plm_threshold(p: &ModelParams) -> PlmThreshold {
    let delta_slack = p.delta0 * (1.0 - p.delta);
    PlmThreshold {
        pi_hat: (p.p_h - delta_slack).max(0.0),
        delta_slack,
    }
}

/// Hire iff the individual reputation reaches the cutoff. Workers with no
/// observed outcomes are not hired.
pub fn plm_hire(reputation: Option<f64>, thr: &PlmThreshold) -> bool {
    reputation.is_some_and(|r| r >= thr.pi_hat)
}
