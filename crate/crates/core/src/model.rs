//! Closed enumerations and per-worker state.

use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Group {
    B,
    W,
}

impl Group {
    pub const ALL: [Group; 2] = [Group::B, Group::W];
}

/// Hidden qualification type. Firms never observe it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum QualType {
    Q,
    U,
}

impl QualType {
    pub const ALL: [QualType; 2] = [QualType::Q, QualType::U];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Effort {
    H,
    L,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Outcome {
    G,
    Bad,
}

/// A value held once per group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct PerGroup<T> {
    pub b: T,
    pub w: T,
}

impl<T> PerGroup<T> {
    pub fn new(b: T, w: T) -> Self {
        Self { b, w }
    }

    pub fn from_fn(mut f: impl FnMut(Group) -> T) -> Self {
        Self {
            b: f(Group::B),
            w: f(Group::W),
        }
    }

    pub fn map<U>(&self, mut f: impl FnMut(&T) -> U) -> PerGroup<U> {
        PerGroup {
            b: f(&self.b),
            w: f(&self.w),
        }
    }
}

impl<T> Index<Group> for PerGroup<T> {
    type Output = T;

    fn index(&self, g: Group) -> &T {
        match g {
            Group::B => &self.b,
            Group::W => &self.w,
        }
    }
}

impl<T> IndexMut<Group> for PerGroup<T> {
    fn index_mut(&mut self, g: Group) -> &mut T {
        match g {
            Group::B => &mut self.b,
            Group::W => &mut self.w,
        }
    }
}

/// Where a worker currently is. `employed` marks a skilled-task position
/// (paid the wage premium); market workers without one work the unskilled
/// task at wage zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Location {
    PreMarket,
    Tlm { employed: bool },
    Plm { employed: bool },
    Exited,
}

impl Location {
    pub fn in_market(self) -> bool {
        matches!(self, Location::Tlm { .. } | Location::Plm { .. })
    }

    pub fn is_employed(self) -> bool {
        matches!(
            self,
            Location::Tlm { employed: true } | Location::Plm { employed: true }
        )
    }
}

/// Observed outcome sequence of one worker.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct History {
    outcomes: Vec<Outcome>,
    good: u32,
}

impl History {
    pub fn from_outcomes(outcomes: Vec<Outcome>) -> Self {
        let good = outcomes.iter().filter(|o| **o == Outcome::G).count() as u32;
        Self { outcomes, good }
    }

    pub fn push(&mut self, o: Outcome) {
        if o == Outcome::G {
            self.good += 1;
        }
        self.outcomes.push(o);
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn good_count(&self) -> u32 {
        self.good
    }

    pub fn outcomes(&self) -> &[Outcome] {
        &self.outcomes
    }

    pub fn last(&self) -> Option<Outcome> {
        self.outcomes.last().copied()
    }

    /// Individual reputation: share of `G` outcomes. Undefined for an empty history.
    pub fn reputation(&self) -> Option<f64> {
        if self.outcomes.is_empty() {
            None
        } else {
            Some(self.good as f64 / self.outcomes.len() as f64)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WorkerState {
    pub id: u64,
    pub group: Group,
    theta: f64,
    rho: QualType,
    pub eta: f64,
    pub location: Location,
    pub history: History,
    pub entry_time: u64,
}

impl WorkerState {
    pub fn new(id: u64, group: Group, theta: f64, rho: QualType, entry_time: u64) -> Self {
        Self {
            id,
            group,
            theta,
            rho,
            eta: 0.0,
            location: Location::PreMarket,
            history: History::default(),
            entry_time,
        }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn rho(&self) -> QualType {
        self.rho
    }

    pub fn reputation(&self) -> Option<f64> {
        self.history.reputation()
    }
}
