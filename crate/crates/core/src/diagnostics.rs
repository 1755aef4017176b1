//! Diagnostics tying per-step communication graphs to variance decay.

use crate::energy::dirichlet_form;
use crate::graph::WeightedGraph;
use crate::system::{variance, EmbeddedState};
use crate::unionfind::UnionFind;

/// Outcome of the cover-length check on one run prefix.
#[derive(Debug, Clone)]
pub struct CoverLengthReport {
    /// First time (1-indexed) by which the cumulative edge union stops
    /// gaining connectivity; 1 when no step ever merges components.
    pub t_c: usize,
    /// Whether the union of the first `t_c` graphs is connected.
    pub connected: bool,
    /// Sum over t = 1..=t_c of the Dirichlet forms D_t of the states fed
    /// into each step.
    pub dirichlet_sum: f64,
    /// (rho / n^2) times the q-variance of the first state.
    pub variance_bound: f64,
    /// Whether `dirichlet_sum >= variance_bound` held; `None` when the
    /// union graph is disconnected (the inequality is then not asserted).
    pub holds: Option<bool>,
}

/// Smallest 1-indexed time by which the running union of the given graphs has
/// merged as much as it ever will; returns 1 for an empty history or when no
/// graph ever joins two components.
pub fn cover_time(graphs: &[&WeightedGraph]) -> usize {
    if graphs.is_empty() {
        return 1;
    }
    let n = graphs[0].n();
    let mut uf = UnionFind::new(n);
    let mut last_merge = 1;
    for (idx, g) in graphs.iter().enumerate() {
        let mut merged = false;
        for &(i, j) in g.edges() {
            merged |= uf.union(i, j);
        }
        if merged {
            last_merge = idx + 1;
        }
    }
    last_merge
}

/// Checks the covering inequality on a run prefix: if the union of the graphs
/// up to the cover time `t_c` is connected, the Dirichlet sums up to `t_c`
/// must total at least (rho / n^2) times the initial q-variance.
///
/// `states[k]` is required to be the state the system held *before* applying
/// `graphs[k]`, so `states` must be at least as long as `graphs`. `rho` and
/// `q` describe the (graph-independent) weights shared by every step.
pub fn check_cover_length(
    states: &[EmbeddedState],
    graphs: &[&WeightedGraph],
    q: &[f64],
    rho: f64,
) -> CoverLengthReport {
    assert!(
        states.len() >= graphs.len(),
        "need the pre-step state for every graph: {} states for {} graphs",
        states.len(),
        graphs.len()
    );
    let t_c = cover_time(graphs);
    let connected = {
        let n = q.len();
        let mut uf = UnionFind::new(n);
        for g in graphs.iter().take(t_c) {
            for &(i, j) in g.edges() {
                uf.union(i, j);
            }
        }
        uf.set_count() == 1
    };
    let dirichlet_sum: f64 = graphs
        .iter()
        .take(t_c)
        .zip(states.iter())
        .map(|(g, x)| dirichlet_form(x, g))
        .sum();
    let n = q.len() as f64;
    let variance_bound = if states.is_empty() {
        0.0
    } else {
        rho / (n * n) * variance(q, &states[0].values)
    };
    let holds = if connected {
        Some(dirichlet_sum >= variance_bound)
    } else {
        None
    };
    CoverLengthReport {
        t_c,
        connected,
        dirichlet_sum,
        variance_bound,
        holds,
    }
}
