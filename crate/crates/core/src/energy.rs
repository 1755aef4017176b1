//! Block decomposition of an embedded graph and the s-energy ledger.
//!
//! At each step the edges of the interaction graph embed as value intervals;
//! the blocks are the maximal intervals of their union. Summing length^s of
//! every block over a whole run gives the run's total s-energy, the quantity
//! the closed-form bounds in [`crate::bounds`] cap from above.

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::system::EmbeddedState;

/// Endpoints closer than this are treated as touching when blocks merge.
pub const BLOCK_MERGE_TOLERANCE: f64 = 1e-12;

/// A maximal interval of the union of embedded edges at one step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Block {
    pub lo: f64,
    pub hi: f64,
}

impl Block {
    #[must_use]
    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Blocks of `graph` under the embedding `state`, sorted by position.
#[must_use]
pub fn compute_blocks(state: &EmbeddedState, graph: &WeightedGraph) -> Vec<Block> {
    let mut intervals = Vec::new();
    let mut out = Vec::new();
    compute_blocks_into(&state.values, graph, &mut intervals, &mut out);
    out
}

/// Allocation-free core of [`compute_blocks`]; hot loops reuse the buffers.
pub(crate) fn compute_blocks_into(
    values: &[f64],
    graph: &WeightedGraph,
    intervals: &mut Vec<(f64, f64)>,
    out: &mut Vec<Block>,
) {
    intervals.clear();
    out.clear();
    for &(i, j) in graph.edges() {
        let (a, b) = (values[i], values[j]);
        intervals.push(if a <= b { (a, b) } else { (b, a) });
    }
    intervals.sort_unstable_by(|x, y| x.partial_cmp(y).expect("finite endpoints"));

    for &(lo, hi) in intervals.iter() {
        match out.last_mut() {
            Some(last) if lo <= last.hi + BLOCK_MERGE_TOLERANCE => {
                last.hi = last.hi.max(hi);
            }
            _ => out.push(Block { lo, hi }),
        }
    }
}

/// D(x) = sum_i max_{j ~ i} (x_i - x_j)^2; isolated vertices contribute zero.
///
/// One averaging step of a system on `graph` drops the squared q-norm by at
/// least D/2, which is what makes this the engine of every decay estimate.
#[must_use]
pub fn dirichlet_form(state: &EmbeddedState, graph: &WeightedGraph) -> f64 {
    let x = &state.values;
    (0..graph.n())
        .map(|i| {
            graph
                .neighbors(i)
                .iter()
                .map(|&j| (x[i] - x[j]) * (x[i] - x[j]))
                .fold(0.0, f64::max)
        })
        .sum()
}

/// Per-step block lengths of a run plus the running total at exponent `s`.
#[derive(Clone, Debug)]
pub struct EnergyLedger {
    s: f64,
    per_step: Vec<Vec<f64>>,
    total: f64,
}

impl EnergyLedger {
    /// Ledger accumulating sum of length^s; requires s in (0, 1].
    pub fn new(s: f64) -> Result<Self> {
        validate_s(s)?;
        Ok(Self {
            s,
            per_step: Vec::new(),
            total: 0.0,
        })
    }

    pub fn record_blocks(&mut self, blocks: &[Block]) {
        self.record_step(blocks.iter().map(Block::length).collect());
    }

    pub fn record_step(&mut self, lengths: Vec<f64>) {
        self.total += lengths.iter().map(|&l| powf_s(l, self.s)).sum::<f64>();
        self.per_step.push(lengths);
    }

    #[must_use]
    pub fn s(&self) -> f64 {
        self.s
    }

    #[must_use]
    pub fn steps(&self) -> usize {
        self.per_step.len()
    }

    #[must_use]
    pub fn per_step(&self) -> &[Vec<f64>] {
        &self.per_step
    }

    /// Running total maintained by `record_*`.
    #[must_use]
    pub fn total(&self) -> f64 {
        self.total
    }

    /// Total rebuilt from the raw per-step lengths (the ledger invariant is
    /// that this matches `total`).
    #[must_use]
    pub fn recompute_total(&self) -> f64 {
        self.per_step
            .iter()
            .flatten()
            .map(|&l| powf_s(l, self.s))
            .sum()
    }
}

/// Total s-energy of the recorded run at exponent `s`: sum over steps of
/// sum_i length_i^s.
pub fn s_energy(ledger: &EnergyLedger, s: f64) -> Result<f64> {
    validate_s(s)?;
    Ok(ledger
        .per_step()
        .iter()
        .map(|step| step.iter().map(|&l| powf_s(l, s)).sum::<f64>())
        .sum())
}

/// Variant used by the pinned-swarm analysis: per step only the largest block
/// counts, E_{s,t} = (max_i length_i)^s.
pub fn s_energy_max(ledger: &EnergyLedger, s: f64) -> Result<f64> {
    validate_s(s)?;
    Ok(ledger
        .per_step()
        .iter()
        .map(|step| powf_s(step.iter().copied().fold(0.0, f64::max), s))
        .sum())
}

fn validate_s(s: f64) -> Result<()> {
    if !(s > 0.0 && s <= 1.0) {
        return Err(Error::InvalidParameter {
            name: "s",
            value: s,
            constraint: "exponent must lie in (0, 1]",
        });
    }
    Ok(())
}

/// length^s with the s = 1 fast path (the common case in long replays).
#[inline]
pub(crate) fn powf_s(l: f64, s: f64) -> f64 {
    if s == 1.0 {
        l
    } else {
        l.powf(s)
    }
}
