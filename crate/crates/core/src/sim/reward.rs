//! Monte-Carlo value of a good outcome over a bad one.
//!
//! Paired rollouts follow a clone of the worker forward under the equilibrium
//! strategies, once with a good and once with a bad outcome appended to its
//! record, using common random numbers. The wage path is the mean-field path
//! from the current market state.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{ModelError, Result};
use crate::forms::{outcome_prob, wage_of};
use crate::hiring::plm_hire;
use crate::meanfield::equilibrium_path;
use crate::model::{Effort, Location, Outcome, WorkerState};

use super::engine::{effort_at_wage, oscillation_strategy, SimulationState};
use super::rng::{keyed, PURPOSE_ROLLOUT};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RewardEstimate {
    pub mean: f64,
    pub std_err: f64,
    pub rollouts: usize,
}

fn rollout_pay(
    worker: &WorkerState,
    first: Outcome,
    state: &SimulationState,
    wages: &[f64],
    r: u64,
) -> f64 {
    let p = &state.params;
    let move_p = 1.0 - (-p.kappa).exp();
    let exit_p = 1.0 - (-p.lambda).exp();
    let mut rng = keyed(p.seed, worker.id, state.t, PURPOSE_ROLLOUT + r);
    let mut history = worker.history.clone();
    let mut location = worker.location;
    let mut pay = 0.0;
    let mut discount = 1.0;
    for (k, &wage) in wages.iter().enumerate() {
        // Both branches consume the same two draws every period.
        let u_outcome = rng.gen::<f64>();
        let u_flow = rng.gen::<f64>();
        if location == Location::Exited {
            break;
        }
        let outcome = if k == 0 {
            first
        } else {
            let prev_wage = wages[k - 1];
            let mut e = effort_at_wage(worker.theta(), worker.rho(), prev_wage, p);
            if state.options.oscillation && location == (Location::Plm { employed: true }) {
                if let Some(rep) = history.reputation() {
                    if oscillation_strategy(rep, history.len(), state.plm.pi_hat) {
                        e = Effort::L;
                    }
                }
            }
            if u_outcome < outcome_prob(worker.rho(), e, p) {
                Outcome::G
            } else {
                Outcome::Bad
            }
        };
        history.push(outcome);
        location = match location {
            Location::Tlm { .. } if u_flow < move_p => Location::Plm { employed: false },
            Location::Plm { .. } if u_flow < exit_p => Location::Exited,
            other => other,
        };
        if let Location::Plm { .. } = location {
            location = Location::Plm {
                employed: plm_hire(history.reputation(), &state.plm),
            };
        }
        if location.is_employed() {
            pay += discount * wage;
        }
        discount *= p.delta;
    }
    pay
}

/// Discounted pay difference between a good and a bad outcome this period.
pub fn estimate_marginal_reward(
    worker: &WorkerState,
    state: &SimulationState,
    horizon: usize,
    rollouts: usize,
) -> Result<RewardEstimate> {
    if horizon == 0 || rollouts == 0 {
        return Err(ModelError::Domain {
            what: "horizon/rollouts",
            value: horizon.min(rollouts) as f64,
            expected: ">= 1",
        });
    }
    let p = &state.params;
    let path = equilibrium_path(state.market.g_plm, horizon, p)?;
    let wages = path[..horizon]
        .iter()
        .map(|&g| wage_of(g, p))
        .collect::<Result<Vec<_>>>()?;
    let diffs: Vec<f64> = (0..rollouts as u64)
        .map(|r| {
            rollout_pay(worker, Outcome::G, state, &wages, r)
                - rollout_pay(worker, Outcome::Bad, state, &wages, r)
        })
        .collect();
    let n = diffs.len() as f64;
    let mean = diffs.iter().sum::<f64>() / n;
    let std_err = if diffs.len() > 1 {
        let var = diffs.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n - 1.0);
        (var / n).sqrt()
    } else {
        0.0
    };
    Ok(RewardEstimate {
        mean,
        std_err,
        rollouts,
    })
}
