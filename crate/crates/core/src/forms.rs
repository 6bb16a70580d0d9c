//! Concrete functional forms: wage, investment and effort costs, outcome
//! probabilities, the ability distribution, and the investment-signal model.

use statrs::distribution::{Beta, ContinuousCDF};

use crate::error::{check_unit, ModelError, Result};
use crate::model::{Effort, QualType};
use crate::params::ModelParams;

/// Wage premium paid to a skilled-task worker when a share `g` of PLM workers
/// produce good outcomes: `w_min + (w_max - w_min) (1 - g)^alpha`.
pub fn wage_of(g: f64, p: &ModelParams) -> Result<f64> {
    check_unit("g", g)?;
    Ok(p.w_min + (p.w_max - p.w_min) * (1.0 - g).powf(p.alpha_wage))
}

/// Multiplier applied to investment costs of a group with collective
/// reputation `pi`. Equal to one at `pi = 1`.
pub fn reputation_multiplier(pi: f64, p: &ModelParams) -> f64 {
    1.0 + p.beta_rep * (1.0 - pi)
}

pub fn investment_cost(theta: f64, eta: f64, pi: f64, p: &ModelParams) -> Result<f64> {
    if !(theta > 0.0) {
        return Err(ModelError::Domain {
            what: "theta",
            value: theta,
            expected: "(0, 1)",
        });
    }
    if !(eta >= 0.0) {
        return Err(ModelError::Domain {
            what: "eta",
            value: eta,
            expected: ">= 0",
        });
    }
    check_unit("pi", pi)?;
    Ok(reputation_multiplier(pi, p) * eta / theta)
}

/// Largest investment a worker of ability `theta` can make at cost no
/// greater than `wage`: the inverse of `investment_cost` in `eta`.
pub fn investment_capacity(theta: f64, pi: f64, wage: f64, p: &ModelParams) -> f64 {
    wage * theta / reputation_multiplier(pi, p)
}

/// Ability at which a group with reputation `pi` is exactly willing to invest
/// `eta` for `wage`. Workers above it invest, workers below do not.
pub fn ability_for_investment(eta: f64, pi: f64, wage: f64, p: &ModelParams) -> f64 {
    reputation_multiplier(pi, p) * eta / wage
}

pub fn effort_cost(theta: f64, rho: QualType, p: &ModelParams) -> Result<f64> {
    if !(theta > 0.0) {
        return Err(ModelError::Domain {
            what: "theta",
            value: theta,
            expected: "(0, 1)",
        });
    }
    Ok(p.effort_scale(rho) / theta)
}

pub fn effort_cost_inverse(x: f64, rho: QualType, p: &ModelParams) -> Result<f64> {
    if !(x > 0.0) {
        return Err(ModelError::Domain {
            what: "cost",
            value: x,
            expected: "> 0",
        });
    }
    Ok(p.effort_scale(rho) / x)
}

pub fn outcome_prob(rho: QualType, e: Effort, p: &ModelParams) -> f64 {
    match e {
        Effort::H => p.p_h,
        Effort::L => p.p_low(rho),
    }
}

/// Ability distribution shared by both groups: Beta(`beta_a`, `beta_b`) on (0, 1).
#[derive(Debug, Clone)]
pub struct AbilityDist {
    beta: Option<Beta>,
}

impl AbilityDist {
    pub fn new(p: &ModelParams) -> Result<Self> {
        if p.beta_a == 1.0 && p.beta_b == 1.0 {
            return Ok(Self { beta: None });
        }
        let beta = Beta::new(p.beta_a, p.beta_b).map_err(|_| ModelError::Domain {
            what: "beta shape",
            value: p.beta_a.min(p.beta_b),
            expected: "> 0",
        })?;
        Ok(Self { beta: Some(beta) })
    }

    pub fn quantile(&self, u: f64) -> Result<f64> {
        check_unit("u", u)?;
        Ok(match &self.beta {
            None => u,
            Some(b) => b.inverse_cdf(u),
        })
    }

    /// CDF clamped outside (0, 1), so cutoffs above one saturate at 1.
    pub fn cdf(&self, theta: f64) -> f64 {
        if theta <= 0.0 {
            return 0.0;
        }
        if theta >= 1.0 {
            return 1.0;
        }
        match &self.beta {
            None => theta,
            Some(b) => b.cdf(theta),
        }
    }

    /// Share of the population strictly above `theta`.
    pub fn survival(&self, theta: f64) -> f64 {
        1.0 - self.cdf(theta)
    }
}

pub fn ability_quantile(u: f64, p: &ModelParams) -> Result<f64> {
    AbilityDist::new(p)?.quantile(u)
}

pub fn ability_cdf(theta: f64, p: &ModelParams) -> Result<f64> {
    check_unit("theta", theta)?;
    Ok(AbilityDist::new(p)?.cdf(theta))
}

/// Density of the investment signal `v` for a skilled (`Q`) or unskilled
/// (`U`) worker: `2v` and `2(1 - v)` on [0, 1].
pub fn signal_density(v: f64, s: QualType) -> Result<f64> {
    check_unit("v", v)?;
    Ok(match s {
        QualType::Q => 2.0 * v,
        QualType::U => 2.0 * (1.0 - v),
    })
}

/// `p_S(v) / p_U(v)`; infinite at `v = 1`.
pub fn likelihood_ratio(v: f64) -> Result<f64> {
    Ok(signal_density(v, QualType::Q)? / signal_density(v, QualType::U)?)
}
