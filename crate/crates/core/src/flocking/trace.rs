//! Backward tracing of a velocity coordinate through the switching network,
//! plus bookkeeping that ties trace jumps to network activity.

use crate::energy::{compute_blocks_into, Block};
use crate::error::{Error, Result};
use crate::graph::WeightedGraph;

use super::FlockRun;

/// Result of walking one velocity coordinate backwards from a bird.
#[derive(Debug, Clone)]
pub struct TraceResult {
    /// Bird the walk starts from (at the final time).
    pub bird: usize,
    /// Coordinate axis traced (0, 1, or 2).
    pub axis: usize,
    /// Block-width threshold that triggers a jump.
    pub alpha: f64,
    /// Traced values; `w_bar[i]` is the value held at time `i + 1`.
    pub w_bar: Vec<f64>,
    /// Bird held at each time; `visited[i]` is the bird at time `i + 1`.
    pub visited: Vec<usize>,
    /// Times in `[1, t - 1]` at which the walk jumped birds, ascending.
    pub r_times: Vec<usize>,
    /// Displacement-averaged velocity of the start bird along the axis.
    pub u: f64,
    /// `u` minus the start bird's final velocity along the axis.
    pub delta: f64,
    /// Bird the walk ends on at time 1.
    pub final_bird: usize,
    /// Absolute defect of the summation-by-parts identity over `w_bar`.
    pub sbp_error: f64,
}

/// Width of the block containing `values[bird]` under `graph`, or 0 when the
/// bird has no neighbors. The lowest containing block wins ties.
fn containing_block_width(
    bird: usize,
    values: &[f64],
    graph: &WeightedGraph,
    intervals: &mut Vec<(f64, f64)>,
    blocks: &mut Vec<Block>,
) -> f64 {
    if graph.degree(bird) == 0 {
        return 0.0;
    }
    compute_blocks_into(values, graph, intervals, blocks);
    let w = values[bird];
    blocks
        .iter()
        .find(|b| b.lo <= w && w <= b.hi)
        .map_or(0.0, Block::length)
}

/// Smallest-index minimizer of `values` over `bird` and its neighbors.
fn closed_neighborhood_argmin(bird: usize, values: &[f64], graph: &WeightedGraph) -> usize {
    let mut best = bird;
    for &j in graph.neighbors(bird) {
        if values[j] < values[best] || (values[j] == values[best] && j < best) {
            best = j;
        }
    }
    best
}

/// Walks one velocity coordinate backwards from `bird` at the final time,
/// jumping to the smallest neighborhood value whenever the containing block
/// is wider than `alpha`. Requires a recorded run.
pub fn backward_trace(run: &FlockRun, bird: usize, axis: usize, alpha: f64) -> Result<TraceResult> {
    let history = run.history.as_ref().ok_or_else(|| {
        Error::InsufficientData("backward trace requires a recorded run".into())
    })?;
    let n = run.config.n;
    if bird >= n {
        return Err(Error::InvalidParameter {
            name: "bird",
            value: bird as f64,
            constraint: "must index a bird of the run",
        });
    }
    if axis >= 3 {
        return Err(Error::InvalidParameter {
            name: "axis",
            value: axis as f64,
            constraint: "must be 0, 1, or 2",
        });
    }
    if !(alpha > 0.0 && alpha <= run.config.eps_o) {
        return Err(Error::InvalidParameter {
            name: "alpha",
            value: alpha,
            constraint: "must lie in (0, eps_o]",
        });
    }
    let t = run.state.t;
    if t < 1 {
        return Err(Error::InsufficientData(
            "backward trace needs at least one completed step".into(),
        ));
    }

    let mut w_bar = vec![0.0; t];
    let mut visited = vec![0; t];
    let mut r_times = Vec::new();
    let mut intervals = Vec::new();
    let mut blocks = Vec::new();
    let mut axis_values = vec![0.0; n];

    let mut current = bird;
    w_bar[t - 1] = history.v[t][bird][axis];
    visited[t - 1] = bird;
    for k in (1..t).rev() {
        let graph = history.graph_at(k);
        for (i, val) in axis_values.iter_mut().enumerate() {
            *val = history.v[k][i][axis];
        }
        let width = containing_block_width(current, &axis_values, graph, &mut intervals, &mut blocks);
        if width > alpha {
            current = closed_neighborhood_argmin(current, &axis_values, graph);
            r_times.push(k);
        }
        w_bar[k - 1] = axis_values[current];
        visited[k - 1] = current;
    }
    r_times.reverse();

    let u = (history.x[t][bird][axis] - history.x[0][bird][axis]) / t as f64;
    let delta = u - history.v[t][bird][axis];

    // Summation by parts: sum_k w(k) = t*w(t) - sum_{k<t} k*(w(k+1) - w(k)).
    let lhs: f64 = w_bar.iter().sum();
    let mut rhs = t as f64 * w_bar[t - 1];
    for k in 1..t {
        rhs -= k as f64 * (w_bar[k] - w_bar[k - 1]);
    }

    Ok(TraceResult {
        bird,
        axis,
        alpha,
        w_bar,
        visited,
        r_times,
        u,
        delta,
        final_bird: current,
        sbp_error: (lhs - rhs).abs(),
    })
}

/// One maximal switch-free stretch of time, with trace and block activity.
#[derive(Debug, Clone)]
pub struct IntervalCheck {
    /// Inclusive time range over which the network never changed.
    pub interval: (usize, usize),
    /// Trace jumps that fell inside the interval.
    pub r_count: usize,
    /// Times in the interval where some block on the traced axis exceeded
    /// the trace threshold.
    pub block_exceed_count: usize,
}

/// Network activity summary relating switches, wide blocks, and trace jumps.
#[derive(Debug, Clone)]
pub struct SwitchStats {
    /// Number of network switches over the whole run.
    pub switch_count: usize,
    /// Times in `[1, t - 1]` where some coordinate had a block wider than
    /// the trace threshold.
    pub n_exceed: usize,
    /// The same count split per coordinate axis.
    pub per_coord_exceed: [usize; 3],
    /// Maximal switch-free intervals partitioning `[1, t - 1]`.
    pub intervals: Vec<IntervalCheck>,
}

/// Counts wide-block activity per coordinate and per switch-free interval,
/// using the threshold and axis of a completed trace.
pub fn count_switch_stats(run: &FlockRun, trace: &TraceResult) -> Result<SwitchStats> {
    let history = run.history.as_ref().ok_or_else(|| {
        Error::InsufficientData("switch statistics require a recorded run".into())
    })?;
    let n = run.config.n;
    let t = run.state.t;
    let alpha = trace.alpha;

    let mut per_coord_exceed = [0usize; 3];
    let mut n_exceed = 0usize;
    let mut axis_exceeds = vec![false; t.max(1)];
    let mut intervals_buf = Vec::new();
    let mut blocks = Vec::new();
    let mut values = vec![0.0; n];
    for (k, axis_wide) in axis_exceeds.iter_mut().enumerate().take(t).skip(1) {
        let graph = history.graph_at(k);
        let mut any = false;
        for (c, exceed_count) in per_coord_exceed.iter_mut().enumerate() {
            for (i, val) in values.iter_mut().enumerate() {
                *val = history.v[k][i][c];
            }
            compute_blocks_into(&values, graph, &mut intervals_buf, &mut blocks);
            if blocks.iter().any(|b| b.length() > alpha) {
                *exceed_count += 1;
                any = true;
                if c == trace.axis {
                    *axis_wide = true;
                }
            }
        }
        if any {
            n_exceed += 1;
        }
    }

    let mut intervals = Vec::new();
    if t >= 2 {
        let mut cuts: Vec<usize> = run
            .switches
            .times()
            .into_iter()
            .filter(|&s| s >= 2 && s < t)
            .collect();
        cuts.dedup();
        let mut start = 1;
        for s in cuts {
            intervals.push((start, s - 1));
            start = s;
        }
        intervals.push((start, t - 1));
    }
    let intervals = intervals
        .into_iter()
        .map(|(lo, hi)| IntervalCheck {
            interval: (lo, hi),
            r_count: trace.r_times.iter().filter(|&&k| lo <= k && k <= hi).count(),
            block_exceed_count: (lo..=hi).filter(|&k| axis_exceeds[k]).count(),
        })
        .collect();

    Ok(SwitchStats {
        switch_count: run.switches.len(),
        n_exceed,
        per_coord_exceed,
        intervals,
    })
}
