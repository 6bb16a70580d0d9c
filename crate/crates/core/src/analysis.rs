//! Post-run reports: statistical-parity audit, equilibrium classification,
//! threshold ranking and regime comparison. Everything here is a pure
//! function of recorded output.

use serde::{Deserialize, Serialize};

use crate::error::{ModelError, Result};
use crate::forms::AbilityDist;
use crate::hiring::{regime_thresholds, TlmThresholds};
use crate::meanfield::{effort_threshold_at_wage, parity_time, PARITY_TOL};
use crate::model::{Group, PerGroup, QualType};
use crate::params::ModelParams;
use crate::regime::HiringRegime;
use crate::sim::{HireTally, TimeSeriesRecord};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParityAudit {
    /// Largest `|P(B | hired) - P(B | applied)|` over audited periods.
    pub max_share_deviation: f64,
    pub share_period: Option<u64>,
    /// Largest distance, in workers, between a group's hires and its
    /// proportional share of that period's hires.
    pub max_worker_deviation: f64,
    pub worker_period: Option<u64>,
    pub audited: usize,
    /// Periods without hires.
    pub skipped: Vec<u64>,
}

pub fn parity_audit(tallies: &[HireTally]) -> Result<ParityAudit> {
    if tallies.is_empty() {
        return Err(ModelError::InsufficientData { have: 0, need: 1 });
    }
    let mut out = ParityAudit {
        max_share_deviation: 0.0,
        share_period: None,
        max_worker_deviation: 0.0,
        worker_period: None,
        audited: 0,
        skipped: Vec::new(),
    };
    for tally in tallies {
        let hired = tally.hires.b + tally.hires.w;
        let applied = tally.applicants.b + tally.applicants.w;
        if hired == 0 || applied == 0 {
            out.skipped.push(tally.t);
            continue;
        }
        out.audited += 1;
        let share_b = tally.applicants.b as f64 / applied as f64;
        let dev = (tally.hires.b as f64 / hired as f64 - share_b).abs();
        if out.share_period.is_none() || dev > out.max_share_deviation {
            out.max_share_deviation = dev;
            out.share_period = Some(tally.t);
        }
        for g in Group::ALL {
            let fair_share = hired as f64 * tally.applicants[g] as f64 / applied as f64;
            let dev = (tally.hires[g] as f64 - fair_share).abs();
            if out.worker_period.is_none() || dev > out.max_worker_deviation {
                out.max_worker_deviation = dev;
                out.worker_period = Some(tally.t);
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailWindow {
    /// Reputation gap at or below which an equilibrium counts as symmetric.
    pub band: f64,
    /// Leading share of the horizon excluded from tail statistics.
    pub burn_in_frac: f64,
}

impl Default for TailWindow {
    fn default() -> Self {
        Self {
            band: 0.05,
            burn_in_frac: 0.25,
        }
    }
}

impl TailWindow {
    fn tail<'a>(&self, records: &'a [TimeSeriesRecord]) -> Result<&'a [TimeSeriesRecord]> {
        let horizon = records.len().saturating_sub(1);
        let burn_in = (self.burn_in_frac * horizon as f64).ceil() as usize;
        if records.is_empty() || horizon == 0 || burn_in > horizon {
            return Err(ModelError::InsufficientData {
                have: horizon,
                need: burn_in.max(1),
            });
        }
        Ok(&records[burn_in..])
    }
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let (s, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    if n == 0 {
        0.0
    } else {
        s / n as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EquilibriumKind {
    Symmetric,
    Asymmetric,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumReport {
    pub kind: EquilibriumKind,
    pub rep_gap: f64,
    pub tail_rep_gap: f64,
    pub g_star_estimate: f64,
    pub parity_time: Option<usize>,
    pub theta_cutoffs: Option<TlmThresholds>,
}

pub fn classify_equilibrium(
    records: &[TimeSeriesRecord],
    thresholds: Option<&[TlmThresholds]>,
    window: TailWindow,
) -> Result<EquilibriumReport> {
    let tail = window.tail(records)?;
    let last = records[records.len() - 1];
    let rep_gap = (last.pi_b - last.pi_w).abs();
    let series: Vec<PerGroup<f64>> = records.iter().map(|r| PerGroup::new(r.pi_b, r.pi_w)).collect();
    Ok(EquilibriumReport {
        kind: if rep_gap <= window.band {
            EquilibriumKind::Symmetric
        } else {
            EquilibriumKind::Asymmetric
        },
        rep_gap,
        tail_rep_gap: mean(tail.iter().map(|r| (r.pi_b - r.pi_w).abs())),
        g_star_estimate: mean(tail.iter().map(|r| r.g_plm)),
        parity_time: parity_time(&series, PARITY_TOL),
        theta_cutoffs: thresholds.and_then(|t| t.last().copied()),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RankingReport {
    pub theta_fair: f64,
    pub theta_b: f64,
    pub theta_w: f64,
    /// `theta_w < theta_fair < theta_b`.
    pub ordered: bool,
    /// All three cutoffs agree, as they must at equal reputations.
    pub coincide: bool,
}

/// Checks the blind cutoffs against the fair one. A violation is reported,
/// not raised.
pub fn threshold_ranking_check(fair: &TlmThresholds, blind: &TlmThresholds) -> RankingReport {
    let theta_fair = fair.theta_hat.b;
    let (theta_b, theta_w) = (blind.theta_hat.b, blind.theta_hat.w);
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(1.0);
    RankingReport {
        theta_fair,
        theta_b,
        theta_w,
        ordered: theta_w < theta_fair && theta_fair < theta_b,
        coincide: close(theta_b, theta_fair) && close(theta_w, theta_fair),
    }
}

/// One finished run as seen by the comparison.
#[derive(Debug, Clone, Copy)]
pub struct RunView<'a> {
    pub params: &'a ModelParams,
    pub regime: &'a HiringRegime,
    pub records: &'a [TimeSeriesRecord],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeMetrics {
    pub pi: PerGroup<f64>,
    pub wage: f64,
    pub theta_hat_q: f64,
    pub thresholds: TlmThresholds,
    /// Share of the intake that is hired and would exert effort if qualified.
    pub qualified_supply: f64,
    /// Employed PLM workers per capita.
    pub firm_fill: f64,
    pub wage_means: PerGroup<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParetoGaps {
    pub qualified_supply: f64,
    pub firm_fill: f64,
    /// Group wage-mean gaps, scaled by the wage ceiling.
    pub wage_b: f64,
    pub wage_w: f64,
}

impl ParetoGaps {
    pub fn all(&self) -> [f64; 4] {
        [self.qualified_supply, self.firm_fill, self.wage_b, self.wage_w]
    }

    pub fn max_abs(&self) -> f64 {
        self.all().iter().fold(0.0f64, |m, g| m.max(g.abs()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParetoReport {
    pub fair_regime: String,
    pub other_regime: String,
    pub qualified_supply_fair: f64,
    pub qualified_supply_other: f64,
    pub firm_fill_gap: f64,
    pub per_group_wage_means: PerGroup<(f64, f64)>,
    /// First run minus second run on every tracked metric.
    pub gaps: ParetoGaps,
    /// Weakly better on every metric and strictly better on one, beyond `band`.
    pub dominated: bool,
    pub band: f64,
    /// Effort cutoff of the qualified lies between the fair cutoff and the
    /// second run's group-B cutoff, at the starting reputations and the
    /// second run's tail wage.
    pub premise_initial: bool,
    /// The same condition at the second run's tail reputations.
    pub premise_tail: bool,
    pub fair: RegimeMetrics,
    pub other: RegimeMetrics,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParetoConfig {
    pub band: f64,
    pub burn_in_frac: f64,
}

impl Default for ParetoConfig {
    fn default() -> Self {
        Self {
            band: 0.01,
            burn_in_frac: 0.25,
        }
    }
}

fn qualified_supply(th: &TlmThresholds, theta_q: f64, p: &ModelParams, dist: &AbilityDist) -> f64 {
    Group::ALL
        .iter()
        .map(|&g| {
            let weight = if g == Group::B { p.sigma_b } else { 1.0 - p.sigma_b };
            if th.hire_none[g] {
                0.0
            } else {
                weight * dist.survival(th.theta_hat[g].max(theta_q))
            }
        })
        .sum()
}

fn metrics(run: RunView<'_>, burn_in_frac: f64, dist: &AbilityDist) -> Result<RegimeMetrics> {
    let p = run.params;
    let tail = TailWindow {
        band: 0.0,
        burn_in_frac,
    }
    .tail(run.records)?;
    let pi = PerGroup::new(mean(tail.iter().map(|r| r.pi_b)), mean(tail.iter().map(|r| r.pi_w)));
    let wage = mean(tail.iter().map(|r| r.wage));
    let thresholds = regime_thresholds(run.regime, pi, wage, p)?;
    let theta_hat_q = effort_threshold_at_wage(QualType::Q, wage, p)?;
    Ok(RegimeMetrics {
        pi,
        wage,
        theta_hat_q,
        thresholds,
        qualified_supply: qualified_supply(&thresholds, theta_hat_q, p, dist),
        firm_fill: mean(tail.iter().map(|r| (r.hires_plm_b + r.hires_plm_w) as f64 / p.n as f64)),
        wage_means: PerGroup::new(
            mean(tail.iter().map(|r| r.earnings_b)),
            mean(tail.iter().map(|r| r.earnings_w)),
        ),
    })
}

/// `theta <= theta_hat_q <= theta_b` with `theta` the fair cutoff, evaluated
/// at reputations `pi` and `wage`.
fn premise(
    fair: &HiringRegime,
    other: &HiringRegime,
    pi: PerGroup<f64>,
    wage: f64,
    p: &ModelParams,
) -> Result<bool> {
    let theta = regime_thresholds(fair, pi, wage, p)?.theta_hat.b;
    let theta_b = regime_thresholds(other, pi, wage, p)?.theta_hat.b;
    let theta_q = effort_threshold_at_wage(QualType::Q, wage, p)?;
    Ok(theta <= theta_q && theta_q <= theta_b)
}

pub fn pareto_compare(
    fair: RunView<'_>,
    other: RunView<'_>,
    cfg: ParetoConfig,
) -> Result<ParetoReport> {
    if fair.params != other.params {
        return Err(ModelError::Mismatch("runs use different parameters".into()));
    }
    if fair.records.len() != other.records.len() {
        return Err(ModelError::Mismatch(format!(
            "runs have {} and {} records",
            fair.records.len(),
            other.records.len()
        )));
    }
    let p = fair.params;
    let dist = AbilityDist::new(p)?;
    let mf = metrics(fair, cfg.burn_in_frac, &dist)?;
    let mo = metrics(other, cfg.burn_in_frac, &dist)?;
    let gaps = ParetoGaps {
        qualified_supply: mf.qualified_supply - mo.qualified_supply,
        firm_fill: mf.firm_fill - mo.firm_fill,
        wage_b: (mf.wage_means.b - mo.wage_means.b) / p.w_max,
        wage_w: (mf.wage_means.w - mo.wage_means.w) / p.w_max,
    };
    let dominated = gaps.all().iter().all(|g| *g >= -cfg.band)
        && gaps.all().iter().any(|g| *g > cfg.band);
    let r0 = fair.records[0];
    let premise_initial = premise(
        fair.regime,
        other.regime,
        PerGroup::new(r0.pi_b, r0.pi_w),
        mo.wage,
        p,
    )?;
    let premise_tail = premise(fair.regime, other.regime, mo.pi, mo.wage, p)?;
    Ok(ParetoReport {
        fair_regime: fair.regime.name().to_string(),
        other_regime: other.regime.name().to_string(),
        qualified_supply_fair: mf.qualified_supply,
        qualified_supply_other: mo.qualified_supply,
        firm_fill_gap: gaps.firm_fill,
        per_group_wage_means: PerGroup::new(
            (mf.wage_means.b, mo.wage_means.b),
            (mf.wage_means.w, mo.wage_means.w),
        ),
        gaps,
        dominated,
        band: cfg.band,
        premise_initial,
        premise_tail,
        fair: mf,
        other: mo,
    })
}
