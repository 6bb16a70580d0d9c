use std::fmt;

use thiserror::Error;

/// A single violated parameter constraint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParamViolation {
    pub field: &'static str,
    pub constraint: &'static str,
}

impl fmt::Display for ParamViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.constraint)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("{what} = {value} is outside its domain ({expected})")]
    Domain {
        what: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("invalid parameters: {}", join(.0))]
    InvalidParams(Vec<ParamViolation>),

    #[error("degenerate regime: {0}")]
    DegenerateRegime(String),

    #[error("no root in bracket [{lo}, {hi}] (f(lo) = {f_lo}, f(hi) = {f_hi})")]
    NoRoot { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    #[error("zero effort premium for type {0:?}: p_H equals the low-effort probability")]
    ZeroEffortPremium(crate::model::QualType),

    #[error("internal consistency violation: {0}")]
    InternalConsistency(String),

    #[error("insufficient data: {have} periods available, at least {need} required")]
    InsufficientData { have: usize, need: usize },

    #[error("comparison mismatch: {0}")]
    Mismatch(String),
}

fn join(v: &[ParamViolation]) -> String {
    v.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

pub type Result<T> = std::result::Result<T, ModelError>;

pub(crate) fn check_unit(what: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(ModelError::Domain {
            what,
            value,
            expected: "[0, 1]",
        })
    }
}
