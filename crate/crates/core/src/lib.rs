//! Dual labor-market equilibrium model: a temporary market where firms hire
//! on investment under a regime (group-fair, group-blind or statistical
//! discrimination) and a permanent market that hires on individual track
//! record. Provides the functional forms, hiring solvers, a deterministic
//! mean-field layer, a seeded agent-based engine and post-run analysis.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod error;
pub mod forms;
pub mod hiring;
pub mod market;
pub mod meanfield;
pub mod model;
pub mod params;
pub mod regime;
pub mod sim;
pub mod solve;

pub use error::{ModelError, ParamViolation, Result};
pub use model::{Effort, Group, Outcome, PerGroup, QualType};
pub use params::ModelParams;
pub use regime::{HiringRegime, PriorUpdate};
