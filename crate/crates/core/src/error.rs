//! Crate-wide error type.

use thiserror::Error;

/// Everything that can go wrong while building or running a system.
#[derive(Debug, Error)]
pub enum Error {
    /// An edge referenced a missing vertex, was a self-loop, or repeated a pair.
    #[error("invalid edge ({i}, {j}) on {n} vertices: {reason}")]
    InvalidEdge {
        i: usize,
        j: usize,
        n: usize,
        reason: &'static str,
    },

    /// A scalar parameter fell outside its documented range.
    #[error("parameter `{name}` = {value} rejected: {constraint}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        constraint: &'static str,
    },

    /// Paired slices disagreed in length.
    #[error("dimension mismatch for `{name}`: expected {expected}, got {got}")]
    DimensionMismatch {
        name: &'static str,
        expected: usize,
        got: usize,
    },

    /// An operation was asked to work from too little data (short history,
    /// missing steps, empty input).
    #[error("{0}")]
    InsufficientData(String),

    /// A schedule phase ran past its step budget without meeting its stop rule.
    #[error("phase {phase} exceeded its step budget of {budget} steps")]
    StepBudgetExceeded { phase: usize, budget: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
