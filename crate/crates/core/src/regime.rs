use serde::{Deserialize, Serialize};

use crate::error::{ModelError, Result};

/// How stat-disc firms form their group priors each period.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PriorUpdate {
    /// Priors stay at their configured values.
    #[default]
    Static,
    /// Priors track the groups' current collective reputations.
    EmpiricalWindow,
}

/// TLM hiring regime.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum HiringRegime {
    /// Hire the top `ell` share of each group separately.
    GroupFair { ell: f64 },
    /// One investment threshold for everyone, hiring a share `q` overall.
    GroupBlind { q: f64 },
    /// Posterior-cutoff hiring on the investment signal with group priors.
    StatDisc {
        xi_b: f64,
        xi_w: f64,
        #[serde(default = "default_cutoff")]
        cutoff: f64,
        #[serde(default)]
        prior_update: PriorUpdate,
    },
}

fn default_cutoff() -> f64 {
    0.5
}

impl HiringRegime {
    pub fn name(&self) -> &'static str {
        match self {
            HiringRegime::GroupFair { .. } => "group_fair",
            HiringRegime::GroupBlind { .. } => "group_blind",
            HiringRegime::StatDisc { .. } => "stat_disc",
        }
    }

    /// Default-parameter regime for a kind name.
    pub fn default_for(kind: &str) -> Option<Self> {
        match kind {
            "group_fair" => Some(HiringRegime::GroupFair { ell: 0.8 }),
            "group_blind" => Some(HiringRegime::GroupBlind { q: 0.8 }),
            "stat_disc" => Some(HiringRegime::StatDisc {
                xi_b: 0.3,
                xi_w: 0.7,
                cutoff: 0.5,
                prior_update: PriorUpdate::Static,
            }),
            _ => None,
        }
    }

    pub fn violations(&self) -> Vec<String> {
        let unit = |name: &str, x: f64| {
            if (0.0..=1.0).contains(&x) {
                None
            } else {
                Some(format!("regime.{name}: must lie in [0, 1], got {x}"))
            }
        };
        match *self {
            HiringRegime::GroupFair { ell } => {
                let mut v: Vec<_> = unit("ell", ell).into_iter().collect();
                if ell == 0.0 {
                    v.push("regime.ell: must be > 0 (hiring nobody is degenerate)".into());
                }
                v
            }
            HiringRegime::GroupBlind { q } => {
                let mut v: Vec<_> = unit("q", q).into_iter().collect();
                if q == 0.0 {
                    v.push("regime.q: must be > 0 (hiring nobody is degenerate)".into());
                }
                v
            }
            HiringRegime::StatDisc {
                xi_b, xi_w, cutoff, ..
            } => [unit("xi_b", xi_b), unit("xi_w", xi_w), unit("cutoff", cutoff)]
                .into_iter()
                .flatten()
                .collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(ModelError::DegenerateRegime(v.join("; ")))
        }
    }
}
