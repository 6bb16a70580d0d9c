use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::model::PerGroup;

/// Trailing window of per-period `(good, total)` counts for one group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepWindow {
    slots: VecDeque<(u64, u64)>,
    len: usize,
    seed: f64,
}

impl RepWindow {
    /// Window of `len` periods pre-filled with `pseudo_total` observations at
    /// rate `seed`. An empty window reports `seed`.
    pub fn seeded(len: usize, seed: f64, pseudo_total: u64) -> Self {
        let len = len.max(1);
        let good = (seed * pseudo_total as f64).round() as u64;
        Self {
            slots: std::iter::repeat_n((good, pseudo_total), len).collect(),
            len,
            seed,
        }
    }

    pub fn push(&mut self, good: u64, total: u64) {
        debug_assert!(good <= total);
        if self.slots.len() == self.len {
            self.slots.pop_front();
        }
        self.slots.push_back((good, total));
    }

    pub fn total(&self) -> u64 {
        self.slots.iter().map(|s| s.1).sum()
    }

    pub fn value(&self) -> f64 {
        let (g, t) = self
            .slots
            .iter()
            .fold((0u64, 0u64), |acc, s| (acc.0 + s.0, acc.1 + s.1));
        if t == 0 {
            self.seed
        } else {
            g as f64 / t as f64
        }
    }
}

/// One period's market aggregates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarketState {
    pub t: u64,
    /// Share of PLM workers producing a good outcome.
    pub g_plm: f64,
    /// Share of TLM workers producing a good outcome.
    pub g_tlm: f64,
    pub wage: f64,
    pub rep: PerGroup<RepWindow>,
    pub hires_tlm: PerGroup<u64>,
    pub hires_plm: PerGroup<u64>,
}

impl MarketState {
    pub fn reputations(&self) -> PerGroup<f64> {
        self.rep.map(RepWindow::value)
    }
}
