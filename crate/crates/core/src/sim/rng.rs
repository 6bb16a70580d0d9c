//! Keyed random streams. Every draw is addressed by (seed, worker id, period,
//! purpose), so results do not depend on evaluation order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Worker creation: group, ability, qualification.
pub const PURPOSE_CREATE: u64 = 1;
/// Synthetic starting histories.
pub const PURPOSE_HISTORY: u64 = 2;
/// Per-period outcome and flow draws.
pub const PURPOSE_STEP: u64 = 3;
/// Reward rollouts; the rollout index is added on top.
pub const PURPOSE_ROLLOUT: u64 = 1 << 32;

pub fn keyed(seed: u64, id: u64, period: u64, purpose: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&id.to_le_bytes());
    key[16..24].copy_from_slice(&period.to_le_bytes());
    key[24..].copy_from_slice(&purpose.to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

/// Uniform on the open interval (0, 1).
pub fn open_unit<R: Rng>(rng: &mut R) -> f64 {
    ((rng.gen::<u64>() >> 11) as f64 + 0.5) / (1u64 << 53) as f64
}
