//! Discrete-time agent engine.
//!
//! Period order: entrants invest and are hired into the TLM; every market
//! worker picks effort and draws an outcome; TLM workers move up and PLM
//! workers exit; the PLM rehires on individual reputation; aggregates and the
//! wage close the period. Decisions inside a period use the previous close.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{ModelError, Result};
use crate::forms::{investment_capacity, wage_of, AbilityDist};
use crate::hiring::{plm_hire, plm_threshold, regime_thresholds, PlmThreshold, TlmThresholds};
use crate::market::{MarketState, RepWindow};
use crate::model::{Effort, Group, History, Location, Outcome, PerGroup, QualType, WorkerState};
use crate::params::ModelParams;
use crate::regime::HiringRegime;

use super::rng::{keyed, open_unit, PURPOSE_CREATE, PURPOSE_HISTORY, PURPOSE_STEP};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimOptions {
    /// Initial collective reputations.
    pub pi0: PerGroup<f64>,
    /// Employed PLM workers comfortably above the cutoff coast for a period.
    pub oscillation: bool,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self {
            pi0: PerGroup::new(0.5, 0.5),
            oscillation: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeSeriesRecord {
    pub t: u64,
    pub g_plm: f64,
    pub g_tlm: f64,
    pub wage: f64,
    pub pi_b: f64,
    pub pi_w: f64,
    pub hires_tlm_b: u64,
    pub hires_tlm_w: u64,
    pub hires_plm_b: u64,
    pub hires_plm_w: u64,
    pub mean_effort_rate_q: f64,
    pub mean_effort_rate_u: f64,
    pub plm_size: u64,
    pub tlm_size: u64,
    /// Mean per-worker pay of each group's market workers this period.
    pub earnings_b: f64,
    pub earnings_w: f64,
}

/// TLM applicants and hires of one period.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HireTally {
    pub t: u64,
    pub applicants: PerGroup<u64>,
    pub hires: PerGroup<u64>,
}

#[derive(Debug, Clone, Copy, Default)]
struct PeriodStats {
    effort: [(u64, u64); 2],
    earnings: [(f64, u64); 2],
}

#[derive(Debug, Clone)]
pub struct SimulationState {
    pub t: u64,
    pub workers: Vec<WorkerState>,
    pub market: MarketState,
    pub regime: HiringRegime,
    pub params: ModelParams,
    pub options: SimOptions,
    pub plm: PlmThreshold,
    /// Analytic thresholds the regime implied at the start of the period.
    pub thresholds: TlmThresholds,
    pub tally: HireTally,
    dist: AbilityDist,
    next_id: u64,
    stats: PeriodStats,
}

fn gi(g: Group) -> usize {
    match g {
        Group::B => 0,
        Group::W => 1,
    }
}

fn qi(r: QualType) -> usize {
    match r {
        QualType::Q => 0,
        QualType::U => 1,
    }
}

/// Effort rule at a known wage: high effort iff its cost does not exceed the
/// wage-weighted gain in success probability.
pub fn effort_at_wage(theta: f64, rho: QualType, wage: f64, p: &ModelParams) -> Effort {
    let cost = p.effort_scale(rho) / theta;
    if cost <= wage * (p.p_h - p.p_low(rho)) {
        Effort::H
    } else {
        Effort::L
    }
}

pub fn worker_effort_decision(
    theta: f64,
    rho: QualType,
    g_prev: f64,
    p: &ModelParams,
) -> Result<Effort> {
    Ok(effort_at_wage(theta, rho, wage_of(g_prev, p)?, p))
}

/// True when a worker's record is so far above the cutoff that one bad
/// outcome cannot push it below.
pub fn oscillation_strategy(reputation: f64, history_len: usize, pi_hat: f64) -> bool {
    history_len > 0 && reputation - 1.0 / history_len as f64 > pi_hat
}

fn new_worker(id: u64, t: u64, p: &ModelParams, dist: &AbilityDist) -> Result<WorkerState> {
    let mut rng = keyed(p.seed, id, t, PURPOSE_CREATE);
    let group = if rng.gen::<f64>() < p.sigma_b {
        Group::B
    } else {
        Group::W
    };
    let theta = dist.quantile(open_unit(&mut rng))?.clamp(f64::MIN_POSITIVE, 1.0);
    let rho = if rng.gen::<f64>() < p.gamma_q {
        QualType::Q
    } else {
        QualType::U
    };
    Ok(WorkerState::new(id, group, theta, rho, t))
}

/// Builds the period-0 population: `floor(m n)` TLM workers hired under the
/// regime, the rest in the PLM with synthetic track records of length `tau`
/// matching the seed reputations.
pub fn init_population(
    params: &ModelParams,
    regime: &HiringRegime,
    options: SimOptions,
) -> Result<SimulationState> {
    params.validate()?;
    regime.validate()?;
    crate::error::check_unit("pi_b0", options.pi0.b)?;
    crate::error::check_unit("pi_w0", options.pi0.w)?;
    let p = params.clone();
    let dist = AbilityDist::new(&p)?;
    let n = p.n;
    let n_tlm = (p.m * n as f64).floor() as u64;
    let mut workers = Vec::with_capacity(n as usize);
    for id in 0..n {
        workers.push(new_worker(id, 0, &p, &dist)?);
    }

    let plm = plm_threshold(&p);
    let tau = p.tau as usize;
    let (mut good, mut total) = (0u64, 0u64);
    for w in workers.iter_mut().skip(n_tlm as usize) {
        let mut rng = keyed(p.seed, w.id, 0, PURPOSE_HISTORY);
        let pg = options.pi0[w.group];
        let outcomes = (0..tau)
            .map(|_| {
                if rng.gen::<f64>() < pg {
                    Outcome::G
                } else {
                    Outcome::Bad
                }
            })
            .collect();
        w.history = History::from_outcomes(outcomes);
        total += 1;
        good += u64::from(w.history.last() == Some(Outcome::G));
        w.location = Location::Plm {
            employed: plm_hire(w.history.reputation(), &plm),
        };
    }
    let g0 = if total == 0 {
        options.pi0.b * p.sigma_b + options.pi0.w * (1.0 - p.sigma_b)
    } else {
        good as f64 / total as f64
    };
    let wage = wage_of(g0, &p)?;

    let counts = PerGroup::from_fn(|g| workers.iter().filter(|w| w.group == g).count() as u64);
    let rep = PerGroup::from_fn(|g| RepWindow::seeded(tau, options.pi0[g], counts[g]));
    let market = MarketState {
        t: 0,
        g_plm: g0,
        g_tlm: g0,
        wage,
        rep,
        hires_tlm: PerGroup::new(0, 0),
        hires_plm: PerGroup::new(0, 0),
    };
    let thresholds = regime_thresholds(regime, options.pi0, wage, &p)?;
    let mut state = SimulationState {
        t: 0,
        workers,
        market,
        regime: *regime,
        params: p,
        options,
        plm,
        thresholds,
        tally: HireTally {
            t: 0,
            applicants: PerGroup::new(0, 0),
            hires: PerGroup::new(0, 0),
        },
        dist,
        next_id: n,
        stats: PeriodStats::default(),
    };
    let entrants: Vec<usize> = (0..n_tlm as usize).collect();
    state.tally = state.hire_entrants(&entrants, options.pi0, wage)?;
    state.market.hires_tlm = state.tally.hires;
    state.market.hires_plm = state.plm_employed();
    state.stats = state.rule_stats(wage);
    Ok(state)
}

impl SimulationState {
    pub fn n(&self) -> u64 {
        self.params.n
    }

    fn plm_employed(&self) -> PerGroup<u64> {
        let mut out = PerGroup::new(0, 0);
        for w in &self.workers {
            if let Location::Plm { employed: true } = w.location {
                out[w.group] += 1;
            }
        }
        out
    }

    /// Effort and earnings stats implied by the effort rule, for the initial record.
    fn rule_stats(&self, wage: f64) -> PeriodStats {
        let mut s = PeriodStats::default();
        for w in self.workers.iter().filter(|w| w.location.in_market()) {
            let e = effort_at_wage(w.theta(), w.rho(), wage, &self.params);
            let slot = &mut s.effort[qi(w.rho())];
            slot.0 += u64::from(e == Effort::H);
            slot.1 += 1;
            let pay = &mut s.earnings[gi(w.group)];
            pay.0 += if w.location.is_employed() { wage } else { 0.0 };
            pay.1 += 1;
        }
        s
    }

    /// TLM hiring of the given pre-market workers at reputations `pi` and `wage`.
    fn hire_entrants(&mut self, idx: &[usize], pi: PerGroup<f64>, wage: f64) -> Result<HireTally> {
        let p = &self.params;
        let cap: Vec<f64> = idx
            .iter()
            .map(|&i| {
                let w = &self.workers[i];
                investment_capacity(w.theta(), pi[w.group], wage, p)
            })
            .collect();
        let mut hired = vec![false; idx.len()];
        let mut eta_hat = PerGroup::new(f64::INFINITY, f64::INFINITY);
        let ranked = |members: Vec<usize>, key: &dyn Fn(usize) -> f64| {
            let mut m = members;
            m.sort_by(|&a, &b| {
                key(b)
                    .total_cmp(&key(a))
                    .then(self.workers[idx[a]].id.cmp(&self.workers[idx[b]].id))
            });
            m
        };
        match self.regime {
            HiringRegime::GroupFair { ell } => {
                for g in Group::ALL {
                    let members: Vec<usize> =
                        (0..idx.len()).filter(|&k| self.workers[idx[k]].group == g).collect();
                    let take = (ell * members.len() as f64).round() as usize;
                    let order = ranked(members, &|k| self.workers[idx[k]].theta());
                    if take > 0 {
                        eta_hat[g] = cap[order[take - 1]];
                    }
                    for &k in &order[..take] {
                        hired[k] = true;
                    }
                }
            }
            HiringRegime::GroupBlind { q } => {
                let take = (q * idx.len() as f64).round() as usize;
                let order = ranked((0..idx.len()).collect(), &|k| cap[k]);
                if take > 0 {
                    let e = if q >= 1.0 { 0.0 } else { cap[order[take - 1]] };
                    eta_hat = PerGroup::new(e, e);
                }
                for &k in &order[..take] {
                    hired[k] = true;
                }
            }
            HiringRegime::StatDisc { .. } => {
                let th = regime_thresholds(&self.regime, pi, wage, p)?;
                eta_hat = th.eta_hat;
                for (k, &i) in idx.iter().enumerate() {
                    let g = self.workers[i].group;
                    hired[k] = !th.hire_none[g] && cap[k] >= th.eta_hat[g];
                }
            }
        }
        let mut tally = HireTally {
            t: self.t,
            applicants: PerGroup::new(0, 0),
            hires: PerGroup::new(0, 0),
        };
        for (k, &i) in idx.iter().enumerate() {
            let w = &mut self.workers[i];
            tally.applicants[w.group] += 1;
            if hired[k] {
                tally.hires[w.group] += 1;
                w.eta = eta_hat[w.group];
            } else {
                w.eta = 0.0;
            }
            w.location = Location::Tlm { employed: hired[k] };
        }
        Ok(tally)
    }

    /// Advances one period.
    pub fn step(&mut self) -> Result<()> {
        self.t += 1;
        let t = self.t;
        let pi_prev = self.market.reputations();
        let wage = self.market.wage;
        self.thresholds = regime_thresholds(&self.regime, pi_prev, wage, &self.params)?;

        // Entrants invest and join the TLM.
        let entrants: Vec<usize> = (0..self.workers.len())
            .filter(|&i| self.workers[i].location == Location::PreMarket)
            .collect();
        self.tally = self.hire_entrants(&entrants, pi_prev, wage)?;

        // Effort, outcomes, flows.
        let p = &self.params;
        let move_p = 1.0 - (-p.kappa).exp();
        let exit_p = 1.0 - (-p.lambda).exp();
        let mut stats = PeriodStats::default();
        let mut rep_counts = [(0u64, 0u64); 2];
        let (mut plm_good, mut plm_n, mut tlm_good, mut tlm_n) = (0u64, 0u64, 0u64, 0u64);
        let mut exited = Vec::new();
        for (i, w) in self.workers.iter_mut().enumerate() {
            let start = w.location;
            if !start.in_market() {
                continue;
            }
            let mut rng = keyed(p.seed, w.id, t, PURPOSE_STEP);
            let mut effort = effort_at_wage(w.theta(), w.rho(), wage, p);
            if self.options.oscillation && start == (Location::Plm { employed: true }) {
                if let Some(r) = w.history.reputation() {
                    if oscillation_strategy(r, w.history.len(), self.plm.pi_hat) {
                        effort = Effort::L;
                    }
                }
            }
            let prob = crate::forms::outcome_prob(w.rho(), effort, p);
            let outcome = if rng.gen::<f64>() < prob {
                Outcome::G
            } else {
                Outcome::Bad
            };
            let flow = rng.gen::<f64>();
            w.history.push(outcome);
            let good = outcome == Outcome::G;
            let employed = start.is_employed();

            let e = &mut stats.effort[qi(w.rho())];
            e.0 += u64::from(effort == Effort::H);
            e.1 += 1;
            let pay = &mut stats.earnings[gi(w.group)];
            pay.0 += if employed { wage } else { 0.0 };
            pay.1 += 1;
            let rc = &mut rep_counts[gi(w.group)];
            rc.0 += u64::from(good && employed);
            rc.1 += 1;

            match start {
                Location::Tlm { .. } => {
                    tlm_good += u64::from(good);
                    tlm_n += 1;
                    if flow < move_p {
                        w.location = Location::Plm { employed: false };
                    }
                }
                Location::Plm { .. } => {
                    plm_good += u64::from(good);
                    plm_n += 1;
                    if flow < exit_p {
                        w.location = Location::Exited;
                        exited.push(i);
                    }
                }
                _ => unreachable!(),
            }
        }

        for i in exited {
            let id = self.next_id;
            self.next_id += 1;
            self.workers[i] = new_worker(id, t, &self.params, &self.dist)?;
        }

        // PLM spot hiring on individual reputation.
        for w in self.workers.iter_mut() {
            if let Location::Plm { .. } = w.location {
                w.location = Location::Plm {
                    employed: plm_hire(w.history.reputation(), &self.plm),
                };
            }
        }

        let frac = |a: u64, b: u64, fallback: f64| if b == 0 { fallback } else { a as f64 / b as f64 };
        let g_plm = frac(plm_good, plm_n, self.market.g_plm);
        let g_tlm = frac(tlm_good, tlm_n, self.market.g_tlm);
        self.market.t = t;
        self.market.g_plm = g_plm;
        self.market.g_tlm = g_tlm;
        self.market.wage = wage_of(g_plm, &self.params)?;
        for g in Group::ALL {
            let (good, total) = rep_counts[gi(g)];
            self.market.rep[g].push(good, total);
        }
        self.market.hires_tlm = self.tally.hires;
        self.market.hires_plm = self.plm_employed();
        self.stats = stats;
        self.check_invariants()
    }

    fn check_invariants(&self) -> Result<()> {
        if self.workers.len() as u64 != self.params.n {
            return Err(ModelError::InternalConsistency(format!(
                "population {} differs from n = {}",
                self.workers.len(),
                self.params.n
            )));
        }
        let m = &self.market;
        let pi = m.reputations();
        for (name, v) in [("g_plm", m.g_plm), ("g_tlm", m.g_tlm), ("pi_b", pi.b), ("pi_w", pi.w)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(ModelError::InternalConsistency(format!("{name} = {v} outside [0, 1]")));
            }
        }
        if !(m.wage >= self.params.w_min && m.wage <= self.params.w_max) {
            return Err(ModelError::InternalConsistency(format!("wage {} out of bounds", m.wage)));
        }
        for w in &self.workers {
            if let Location::Plm { employed: true } = w.location {
                if !plm_hire(w.history.reputation(), &self.plm) {
                    return Err(ModelError::InternalConsistency(format!(
                        "worker {} employed in the PLM below the cutoff",
                        w.id
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn record(&self) -> TimeSeriesRecord {
        let m = &self.market;
        let pi = m.reputations();
        let rate = |(a, b): (u64, u64)| if b == 0 { 0.0 } else { a as f64 / b as f64 };
        let mean = |(a, b): (f64, u64)| if b == 0 { 0.0 } else { a / b as f64 };
        let plm_size = self
            .workers
            .iter()
            .filter(|w| matches!(w.location, Location::Plm { .. }))
            .count() as u64;
        TimeSeriesRecord {
            t: self.t,
            g_plm: m.g_plm,
            g_tlm: m.g_tlm,
            wage: m.wage,
            pi_b: pi.b,
            pi_w: pi.w,
            hires_tlm_b: m.hires_tlm.b,
            hires_tlm_w: m.hires_tlm.w,
            hires_plm_b: m.hires_plm.b,
            hires_plm_w: m.hires_plm.w,
            mean_effort_rate_q: rate(self.stats.effort[0]),
            mean_effort_rate_u: rate(self.stats.effort[1]),
            plm_size,
            // Pre-market entrants are the TLM's next intake.
            tlm_size: self.params.n - plm_size,
            earnings_b: mean(self.stats.earnings[0]),
            earnings_w: mean(self.stats.earnings[1]),
        }
    }
}

/// Full output of one agent run; vectors are indexed by period from 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimOutput {
    pub records: Vec<TimeSeriesRecord>,
    pub tallies: Vec<HireTally>,
    pub thresholds: Vec<TlmThresholds>,
}

pub fn simulate(
    params: &ModelParams,
    regime: &HiringRegime,
    horizon: usize,
    options: SimOptions,
) -> Result<SimOutput> {
    let mut state = init_population(params, regime, options)?;
    let mut out = SimOutput {
        records: Vec::with_capacity(horizon + 1),
        tallies: Vec::with_capacity(horizon + 1),
        thresholds: Vec::with_capacity(horizon + 1),
    };
    let push = |s: &SimulationState, out: &mut SimOutput| {
        out.records.push(s.record());
        out.tallies.push(s.tally);
        out.thresholds.push(s.thresholds);
    };
    push(&state, &mut out);
    for _ in 0..horizon {
        state.step()?;
        push(&state, &mut out);
    }
    Ok(out)
}
