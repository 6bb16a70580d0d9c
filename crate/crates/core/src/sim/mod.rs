//! Agent-based engine and its helpers.

pub mod engine;
pub mod reward;
pub mod rng;

pub use engine::{
    effort_at_wage, init_population, oscillation_strategy, simulate, worker_effort_decision,
    HireTally, SimOptions, SimOutput, SimulationState, TimeSeriesRecord,
};
pub use reward::{estimate_marginal_reward, RewardEstimate};
