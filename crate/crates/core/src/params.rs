use serde::{Deserialize, Serialize};

use crate::error::{ModelError, ParamViolation, Result};

/// Scalar parameters of the economy.
///
/// `Default` is the reference parameter set used throughout the tests:
/// uniform abilities, `p_H = 0.9`, `p_QL = 0.5`, `p_UL = 0.2`, `gamma_Q = 0.6`,
/// wages in `[1, 2]`, `a_Q = 0.1`, `a_U = 0.2`, `beta_rep = 0.5`, `tau = 5`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelParams {
    /// Total worker count.
    pub n: u64,
    /// TLM share of the population.
    pub m: f64,
    /// TLM to PLM transition intensity per period.
    pub kappa: f64,
    /// PLM exit intensity per period.
    pub lambda: f64,
    pub sigma_b: f64,
    pub gamma_q: f64,
    pub p_h: f64,
    pub p_ql: f64,
    pub p_ul: f64,
    pub delta: f64,
    /// Collective-reputation window length in periods.
    pub tau: u32,
    pub w_max: f64,
    pub w_min: f64,
    pub alpha_wage: f64,
    pub beta_rep: f64,
    pub a_q: f64,
    pub a_u: f64,
    pub beta_a: f64,
    pub beta_b: f64,
    pub delta0: f64,
    pub seed: u64,
    /// Run the recursion without the unqualified low-effort term.
    pub strict_recursion: bool,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            n: 20_000,
            m: 0.5,
            kappa: 0.1,
            lambda: 0.1,
            sigma_b: 0.5,
            gamma_q: 0.6,
            p_h: 0.9,
            p_ql: 0.5,
            p_ul: 0.2,
            delta: 0.9,
            tau: 5,
            w_max: 2.0,
            w_min: 1.0,
            alpha_wage: 1.0,
            beta_rep: 0.5,
            a_q: 0.1,
            a_u: 0.2,
            beta_a: 1.0,
            beta_b: 1.0,
            delta0: 0.5,
            seed: 20_180_601,
            strict_recursion: false,
        }
    }
}

impl ModelParams {
    /// Checks every constraint and reports all violations at once.
    pub fn validate(&self) -> Result<()> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(ModelError::InvalidParams(v))
        }
    }

    pub fn violations(&self) -> Vec<ParamViolation> {
        let mut out = Vec::new();
        let mut check = |ok: bool, field: &'static str, constraint: &'static str| {
            if !ok {
                out.push(ParamViolation { field, constraint });
            }
        };
        let finite = [
            self.m,
            self.kappa,
            self.lambda,
            self.sigma_b,
            self.gamma_q,
            self.p_h,
            self.p_ql,
            self.p_ul,
            self.delta,
            self.w_max,
            self.w_min,
            self.alpha_wage,
            self.beta_rep,
            self.a_q,
            self.a_u,
            self.beta_a,
            self.beta_b,
            self.delta0,
        ]
        .iter()
        .all(|x| x.is_finite());
        check(finite, "params", "all real-valued fields must be finite");
        check(self.n >= 1, "n", "n >= 1");
        check(self.m > 0.0 && self.m < 1.0, "m", "0 < m < 1");
        check(self.kappa >= 0.0, "kappa", "kappa >= 0");
        check(self.lambda >= 0.0, "lambda", "lambda >= 0");
        check((0.0..=1.0).contains(&self.sigma_b), "sigma_b", "0 <= sigma_b <= 1");
        check((0.0..=1.0).contains(&self.gamma_q), "gamma_q", "0 <= gamma_q <= 1");
        check(self.p_ul >= 0.0, "p_ul", "p_ul >= 0");
        check(self.p_ul < self.p_ql, "p_ql", "p_ul < p_ql");
        check(self.p_ql < self.p_h, "p_h", "p_ql < p_h");
        check(self.p_h <= 1.0, "p_h", "p_h <= 1");
        check(self.delta > 0.0 && self.delta < 1.0, "delta", "0 < delta < 1");
        check(self.tau >= 1, "tau", "tau >= 1");
        check(self.w_min < self.w_max, "w_min", "w_min < w_max");
        check(self.w_min >= 0.0, "w_min", "w_min >= 0");
        check(self.alpha_wage >= 1.0, "alpha_wage", "alpha_wage >= 1");
        check(self.beta_rep >= 0.0, "beta_rep", "beta_rep >= 0");
        check(self.a_q > 0.0, "a_q", "a_q > 0");
        check(self.a_u >= self.a_q, "a_u", "a_u >= a_q");
        check(self.beta_a > 0.0, "beta_a", "beta_a > 0");
        check(self.beta_b > 0.0, "beta_b", "beta_b > 0");
        check(self.delta0 >= 0.0, "delta0", "delta0 >= 0");
        out
    }

    /// Low-effort success probability for a qualification type.
    pub fn p_low(&self, rho: crate::model::QualType) -> f64 {
        match rho {
            crate::model::QualType::Q => self.p_ql,
            crate::model::QualType::U => self.p_ul,
        }
    }

    pub fn effort_scale(&self, rho: crate::model::QualType) -> f64 {
        match rho {
            crate::model::QualType::Q => self.a_q,
            crate::model::QualType::U => self.a_u,
        }
    }
}
