//! Pinned robot swarms: a connected communication graph in 3D whose edges
//! fail independently each step, anchored by a pinned vertex set that is
//! handled through a mirror-image doubling of the graph across the plane
//! X = 0. The X coordinate starts antisymmetric under the mirror and stays
//! so, which pins the anchors to the plane while the free robots contract
//! onto it.

use crate::bounds::validate_rho;
use crate::energy::{compute_blocks_into, Block, EnergyLedger};
use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::rng::SplitMix64;
use crate::system::{build_system, q_norm_sq, ReversibleSystem};

/// Default thresholds for convergence statistics.
pub const DEFAULT_ALPHAS: [f64; 3] = [0.1, 0.03, 0.01];

/// A base edge together with its mirror image (None when self-mirrored).
pub type EdgeOrbit = ((usize, usize), Option<(usize, usize)>);

/// RNG stream index reserved for drawing initial positions (steps use their
/// own index, so scenario sampling can never collide with failure coins).
const INITIAL_CONDITION_STREAM: u64 = u64::MAX;

/// How pinned vertices are held in place.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PinMode {
    /// Mirror the graph across X = 0 and identify pinned vertices with
    /// their reflections; every vertex keeps a positive weight.
    Symmetrize,
    /// Give pinned vertices zero weight so their rows are the identity.
    /// Breaks the positive-minimum-weight contract, so runs in this mode
    /// are excluded from the reversible-system invariant suites.
    ZeroWeight,
}

/// Classification of a vertex of the simulated (possibly doubled) graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VertexRole {
    Pinned,
    Free,
    /// Mirror image of a free vertex (symmetrized mode only).
    Mirror,
}

/// A pinned-swarm scenario: base graph, anchors, start positions, failures.
#[derive(Debug, Clone)]
pub struct SwarmConfig {
    pub graph: WeightedGraph,
    /// Anchored vertices; must sit on the plane X = 0.
    pub pinned: Vec<usize>,
    /// Initial positions per base vertex, inside the unit cube.
    pub x0: Vec<[f64; 3]>,
    /// Per-step edge retention probability.
    pub p: f64,
    pub seed: u64,
    pub steps: usize,
    /// Per base vertex; None picks a_i = 1/(degree_i + 2) on the simulated
    /// graph. Mirror copies always share their original's weight.
    pub weights: Option<Vec<f64>>,
    /// Thresholds at which convergence statistics are computed.
    pub alphas: Vec<f64>,
    pub pin_mode: PinMode,
}

impl SwarmConfig {
    /// Scenario with retention 1, seed 0, 100 steps, automatic weights.
    pub fn new(graph: WeightedGraph, pinned: Vec<usize>, x0: Vec<[f64; 3]>) -> Self {
        Self {
            graph,
            pinned,
            x0,
            p: 1.0,
            seed: 0,
            steps: 100,
            weights: None,
            alphas: DEFAULT_ALPHAS.to_vec(),
            pin_mode: PinMode::Symmetrize,
        }
    }

    fn validate(&self) -> Result<()> {
        if !self.graph.is_connected() {
            return Err(Error::InvalidParameter {
                name: "graph",
                value: self.graph.component_count() as f64,
                constraint: "base graph must be connected",
            });
        }
        if !(self.p > 0.0 && self.p <= 1.0) {
            return Err(Error::InvalidParameter {
                name: "p",
                value: self.p,
                constraint: "retention probability must lie in (0, 1]",
            });
        }
        if let Some(w) = &self.weights {
            if w.len() != self.graph.n() {
                return Err(Error::DimensionMismatch {
                    name: "weights",
                    expected: self.graph.n(),
                    got: w.len(),
                });
            }
        }
        for &alpha in &self.alphas {
            if !(alpha > 0.0 && alpha.is_finite()) {
                return Err(Error::InvalidParameter {
                    name: "alpha",
                    value: alpha,
                    constraint: "thresholds must be positive and finite",
                });
            }
        }
        Ok(())
    }
}

/// The doubled graph: mirror copies of free vertices glued at the anchors.
#[derive(Debug, Clone)]
pub struct SymmetrizedSystem {
    /// Full doubled graph on nu = 2n - r vertices.
    pub graph: WeightedGraph,
    /// Involution pairing each vertex with its reflection (self for pinned).
    pub mirror: Vec<usize>,
    pub roles: Vec<VertexRole>,
    /// Vertex count of the base graph (base vertices keep indices 0..n).
    pub base_n: usize,
    /// One entry per base edge, in sorted base-edge order: the edge itself
    /// and its mirror image (None when the edge is its own mirror).
    pub orbits: Vec<EdgeOrbit>,
    /// Initial positions of all doubled vertices; reflections carry -X.
    pub x0: Vec<[f64; 3]>,
}

impl SymmetrizedSystem {
    /// Number of vertices of the doubled graph.
    #[must_use]
    pub fn nu(&self) -> usize {
        self.graph.n()
    }
}

/// Doubles `graph` across the plane X = 0, identifying the vertices of
/// `pinned` with their reflections. Positions must lie in the unit cube and
/// pinned vertices must start on the plane.
pub fn symmetrize(
    graph: &WeightedGraph,
    pinned: &[usize],
    x0: &[[f64; 3]],
) -> Result<SymmetrizedSystem> {
    let n = graph.n();
    if pinned.is_empty() {
        return Err(Error::InvalidParameter {
            name: "pinned",
            value: 0.0,
            constraint: "at least one vertex must be pinned",
        });
    }
    let mut sorted = pinned.to_vec();
    sorted.sort_unstable();
    for pair in sorted.windows(2) {
        if pair[0] == pair[1] {
            return Err(Error::InvalidParameter {
                name: "pinned",
                value: pair[0] as f64,
                constraint: "pinned set must not repeat vertices",
            });
        }
    }
    if let Some(&v) = sorted.last() {
        if v >= n {
            return Err(Error::InvalidParameter {
                name: "pinned",
                value: v as f64,
                constraint: "pinned vertex out of range",
            });
        }
    }
    if x0.len() != n {
        return Err(Error::DimensionMismatch {
            name: "x0",
            expected: n,
            got: x0.len(),
        });
    }
    let mut is_pinned = vec![false; n];
    for &v in &sorted {
        is_pinned[v] = true;
    }
    for (i, pos) in x0.iter().enumerate() {
        for &c in pos {
            if !((-1e-12..=1.0 + 1e-12).contains(&c)) {
                return Err(Error::InvalidParameter {
                    name: "x0",
                    value: c,
                    constraint: "coordinates must lie in [0, 1]",
                });
            }
        }
        if is_pinned[i] && pos[0].abs() > 1e-12 {
            return Err(Error::InvalidParameter {
                name: "x0",
                value: pos[0],
                constraint: "pinned vertices must lie on the plane X = 0",
            });
        }
    }

    let mut mirror = vec![0usize; n];
    let mut next = n;
    for i in 0..n {
        if is_pinned[i] {
            mirror[i] = i;
        } else {
            mirror[i] = next;
            next += 1;
        }
    }
    let nu = next;
    let mut full_mirror = vec![0usize; nu];
    let mut roles = vec![VertexRole::Free; nu];
    let mut x0_sym = vec![[0.0; 3]; nu];
    for i in 0..n {
        full_mirror[i] = mirror[i];
        roles[i] = if is_pinned[i] {
            VertexRole::Pinned
        } else {
            VertexRole::Free
        };
        x0_sym[i] = x0[i];
        if !is_pinned[i] {
            full_mirror[mirror[i]] = i;
            roles[mirror[i]] = VertexRole::Mirror;
            x0_sym[mirror[i]] = [-x0[i][0], x0[i][1], x0[i][2]];
        }
    }

    let mut base_edges: Vec<(usize, usize)> = graph
        .edges()
        .iter()
        .map(|&(i, j)| if i < j { (i, j) } else { (j, i) })
        .collect();
    base_edges.sort_unstable();
    let mut orbits = Vec::with_capacity(base_edges.len());
    let mut edges = Vec::with_capacity(2 * base_edges.len());
    for &(i, j) in &base_edges {
        let (mi, mj) = (full_mirror[i], full_mirror[j]);
        let reflected = if mi < mj { (mi, mj) } else { (mj, mi) };
        edges.push((i, j));
        if reflected == (i, j) {
            orbits.push(((i, j), None));
        } else {
            edges.push(reflected);
            orbits.push(((i, j), Some(reflected)));
        }
    }
    Ok(SymmetrizedSystem {
        graph: WeightedGraph::new(nu, &edges)?,
        mirror: full_mirror,
        roles,
        base_n: n,
        orbits,
        x0: x0_sym,
    })
}

/// Keeps each edge independently with probability `p`, drawing one coin per
/// edge in the graph's stored edge order.
pub fn sample_failures(
    graph: &WeightedGraph,
    p: f64,
    rng: &mut SplitMix64,
) -> Result<WeightedGraph> {
    let kept: Vec<(usize, usize)> = graph
        .edges()
        .iter()
        .filter(|_| rng.next_f64() < p)
        .copied()
        .collect();
    WeightedGraph::new(graph.n(), &kept)
}

/// Keeps each base-edge orbit with probability `p`: an edge and its mirror
/// image always share one coin, which is what keeps the reflected copies in
/// exact lockstep.
pub fn sample_failures_mirrored(
    sym: &SymmetrizedSystem,
    p: f64,
    rng: &mut SplitMix64,
) -> Result<WeightedGraph> {
    let mut kept = Vec::with_capacity(2 * sym.orbits.len());
    for &(edge, reflected) in &sym.orbits {
        if rng.next_f64() < p {
            kept.push(edge);
            if let Some(m) = reflected {
                kept.push(m);
            }
        }
    }
    WeightedGraph::new(sym.nu(), &kept)
}

/// Averaging matrix for one step's retained edges. Failures only lower
/// degrees, so weights valid for the full graph stay valid for every
/// retained subgraph.
pub fn build_failure_matrix(subgraph: &WeightedGraph, a: &[f64]) -> Result<ReversibleSystem> {
    build_system(subgraph, a)
}

/// One simulated step: the pre-step X-axis geometry and the retained graph.
#[derive(Debug, Clone)]
pub struct SwarmStepRow {
    pub t: usize,
    /// Largest X-axis block length under the retained graph.
    pub max_block: f64,
    /// Largest single retained-edge X-gap.
    pub max_edge: f64,
    /// X-coordinate diameter over all simulated vertices.
    pub diameter: f64,
    /// Squared q-norm of the X coordinates.
    pub q_norm_sq: f64,
    pub retained_edges: usize,
}

/// Convergence counters at one threshold.
#[derive(Debug, Clone, Copy)]
pub struct ConvergenceStats {
    pub alpha: f64,
    /// Steps whose largest block exceeded alpha.
    pub n_alpha: usize,
    /// Steps whose largest single edge exceeded alpha.
    pub k_alpha: usize,
    /// Last recorded time with X-diameter above alpha (0 when never).
    pub t_alpha: usize,
}

/// Counts threshold exceedances from per-step rows and per-state diameters.
#[must_use]
pub fn convergence_stats(
    rows: &[SwarmStepRow],
    diameters: &[f64],
    alphas: &[f64],
) -> Vec<ConvergenceStats> {
    alphas
        .iter()
        .map(|&alpha| ConvergenceStats {
            alpha,
            n_alpha: rows.iter().filter(|r| r.max_block > alpha).count(),
            k_alpha: rows.iter().filter(|r| r.max_edge > alpha).count(),
            t_alpha: diameters
                .iter()
                .enumerate()
                .rev()
                .find(|&(_, &d)| d > alpha)
                .map_or(0, |(t, _)| t),
        })
        .collect()
}

/// A completed swarm run: full trajectory, per-step rows, energy ledger,
/// and convergence statistics at the configured thresholds.
#[derive(Debug, Clone)]
pub struct SwarmRun {
    pub nu: usize,
    pub roles: Vec<VertexRole>,
    /// Mirror involution (identity in zero-weight mode).
    pub mirror: Vec<usize>,
    /// Per simulated vertex; zero entries mark zero-weight pinned vertices.
    pub weights: Vec<f64>,
    /// Detailed-balance weights 1/a_i (0 for zero-weight pinned vertices).
    pub q: Vec<f64>,
    /// Smallest positive weight.
    pub rho: f64,
    /// Max degree of the full simulated graph.
    pub max_degree: usize,
    pub p: f64,
    /// States 0..=steps of all simulated vertices.
    pub trajectory: Vec<Vec<[f64; 3]>>,
    pub rows: Vec<SwarmStepRow>,
    /// X-axis block lengths per step (use the max-variant accessor).
    pub ledger: EnergyLedger,
    pub stats: Vec<ConvergenceStats>,
}

impl SwarmRun {
    /// Final positions of all simulated vertices.
    #[must_use]
    pub fn final_positions(&self) -> &[[f64; 3]] {
        self.trajectory.last().expect("trajectory holds the initial state")
    }

    /// Largest |X| over the free (non-mirror, non-pinned) vertices at the end.
    #[must_use]
    pub fn max_free_abs_x(&self) -> f64 {
        self.final_positions()
            .iter()
            .zip(&self.roles)
            .filter(|(_, &role)| role == VertexRole::Free)
            .map(|(pos, _)| pos[0].abs())
            .fold(0.0, f64::max)
    }

    /// X-coordinate diameter of every recorded state.
    #[must_use]
    pub fn x_diameters(&self) -> Vec<f64> {
        self.trajectory.iter().map(|state| x_diameter(state)).collect()
    }

    /// Expected one-step contraction constant c = rho p / (2 d nu^2).
    #[must_use]
    pub fn contraction_constant(&self) -> f64 {
        self.rho * self.p / (2.0 * self.max_degree as f64 * (self.nu * self.nu) as f64)
    }
}

/// Successive ratios of the X-coordinate squared q-norm, skipping steps
/// whose starting norm is zero.
#[must_use]
pub fn contraction_ratios(run: &SwarmRun) -> Vec<f64> {
    let norms: Vec<f64> = run
        .trajectory
        .iter()
        .map(|state| {
            let col: Vec<f64> = state.iter().map(|pos| pos[0]).collect();
            q_norm_sq(&run.q, &col)
        })
        .collect();
    norms
        .windows(2)
        .filter(|w| w[0] > 0.0)
        .map(|w| w[1] / w[0])
        .collect()
}

fn x_diameter(state: &[[f64; 3]]) -> f64 {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for pos in state {
        lo = lo.min(pos[0]);
        hi = hi.max(pos[0]);
    }
    if hi > lo {
        hi - lo
    } else {
        0.0
    }
}

/// Runs the configured scenario to completion; seeded and fully
/// deterministic (step t always draws from stream (seed, t)).
pub fn run_swarm(config: &SwarmConfig) -> Result<SwarmRun> {
    config.validate()?;
    match config.pin_mode {
        PinMode::Symmetrize => run_symmetrized(config),
        PinMode::ZeroWeight => run_zero_weight(config),
    }
}

/// Weight per simulated vertex: the caller's per-base weights mirrored onto
/// the copies, or 1/(degree + 2) on the simulated graph. Strictness against
/// 1/(degree + 1) keeps every realized matrix entry at least rho.
fn symmetrized_weights(config: &SwarmConfig, sym: &SymmetrizedSystem) -> Result<Vec<f64>> {
    let nu = sym.nu();
    let mut a = Vec::with_capacity(nu);
    for v in 0..nu {
        let base = if v < sym.base_n { v } else { sym.mirror[v] };
        let degree = sym.graph.degree(v);
        let weight = match &config.weights {
            Some(w) => w[base],
            None => 1.0 / (degree + 2) as f64,
        };
        if !(weight > 0.0 && weight < 1.0 / (degree + 1) as f64) {
            return Err(Error::InvalidParameter {
                name: "a",
                value: weight,
                constraint: "weights must satisfy 0 < a_i < 1/(degree_i + 1) strictly",
            });
        }
        a.push(weight);
    }
    Ok(a)
}

fn run_symmetrized(config: &SwarmConfig) -> Result<SwarmRun> {
    let sym = symmetrize(&config.graph, &config.pinned, &config.x0)?;
    let nu = sym.nu();
    let weights = symmetrized_weights(config, &sym)?;
    let q: Vec<f64> = weights.iter().map(|&a| 1.0 / a).collect();
    let rho = weights.iter().copied().fold(f64::INFINITY, f64::min);

    let mut x = sym.x0.clone();
    let mut trajectory = Vec::with_capacity(config.steps + 1);
    trajectory.push(x.clone());
    let mut rows = Vec::with_capacity(config.steps);
    let mut ledger = EnergyLedger::new(1.0).expect("exponent 1 is valid");
    let mut col = vec![0.0; nu];
    let mut out = vec![0.0; nu];
    let mut intervals = Vec::new();
    let mut blocks: Vec<Block> = Vec::new();

    for t in 0..config.steps {
        let mut rng = SplitMix64::stream(config.seed, t as u64);
        let sub = sample_failures_mirrored(&sym, config.p, &mut rng)?;
        for (ci, pos) in col.iter_mut().zip(&x) {
            *ci = pos[0];
        }
        compute_blocks_into(&col, &sub, &mut intervals, &mut blocks);
        ledger.record_blocks(&blocks);
        rows.push(SwarmStepRow {
            t,
            max_block: blocks.iter().map(Block::length).fold(0.0, f64::max),
            max_edge: sub
                .edges()
                .iter()
                .map(|&(i, j)| (col[i] - col[j]).abs())
                .fold(0.0, f64::max),
            diameter: x_diameter(&x),
            q_norm_sq: q_norm_sq(&q, &col),
            retained_edges: sub.edge_count(),
        });

        let sys = build_failure_matrix(&sub, &weights)?;
        for c in 0..3 {
            for (ci, pos) in col.iter_mut().zip(&x) {
                *ci = pos[c];
            }
            sys.apply_into(&col, &mut out);
            for (pos, &oi) in x.iter_mut().zip(&out) {
                pos[c] = oi;
            }
        }
        trajectory.push(x.clone());
    }

    let diameters: Vec<f64> = trajectory.iter().map(|state| x_diameter(state)).collect();
    let stats = convergence_stats(&rows, &diameters, &config.alphas);
    Ok(SwarmRun {
        nu,
        roles: sym.roles,
        mirror: sym.mirror,
        weights,
        q,
        rho,
        max_degree: sym.graph.max_degree(),
        p: config.p,
        trajectory,
        rows,
        ledger,
        stats,
    })
}

fn run_zero_weight(config: &SwarmConfig) -> Result<SwarmRun> {
    let n = config.graph.n();
    if config.pinned.is_empty() {
        return Err(Error::InvalidParameter {
            name: "pinned",
            value: 0.0,
            constraint: "at least one vertex must be pinned",
        });
    }
    let mut is_pinned = vec![false; n];
    for &v in &config.pinned {
        if v >= n {
            return Err(Error::InvalidParameter {
                name: "pinned",
                value: v as f64,
                constraint: "pinned vertex out of range",
            });
        }
        is_pinned[v] = true;
    }
    if config.x0.len() != n {
        return Err(Error::DimensionMismatch {
            name: "x0",
            expected: n,
            got: config.x0.len(),
        });
    }
    let mut weights = vec![0.0; n];
    for v in 0..n {
        if is_pinned[v] {
            if let Some(w) = &config.weights {
                if w[v] != 0.0 {
                    return Err(Error::InvalidParameter {
                        name: "a",
                        value: w[v],
                        constraint: "pinned vertices take zero weight in this mode",
                    });
                }
            }
            continue;
        }
        let degree = config.graph.degree(v);
        weights[v] = match &config.weights {
            Some(w) => w[v],
            None => 1.0 / (degree + 2) as f64,
        };
        if !(weights[v] > 0.0 && weights[v] < 1.0 / (degree + 1) as f64) {
            return Err(Error::InvalidParameter {
                name: "a",
                value: weights[v],
                constraint: "weights must satisfy 0 < a_i < 1/(degree_i + 1) strictly",
            });
        }
    }
    let q: Vec<f64> = weights.iter().map(|&a| if a > 0.0 { 1.0 / a } else { 0.0 }).collect();
    let rho = weights
        .iter()
        .copied()
        .filter(|&a| a > 0.0)
        .fold(f64::INFINITY, f64::min);
    let roles: Vec<VertexRole> = is_pinned
        .iter()
        .map(|&pinned| if pinned { VertexRole::Pinned } else { VertexRole::Free })
        .collect();

    let mut x = config.x0.clone();
    let mut trajectory = Vec::with_capacity(config.steps + 1);
    trajectory.push(x.clone());
    let mut rows = Vec::with_capacity(config.steps);
    let mut ledger = EnergyLedger::new(1.0).expect("exponent 1 is valid");
    let mut col = vec![0.0; n];
    let mut intervals = Vec::new();
    let mut blocks: Vec<Block> = Vec::new();

    for t in 0..config.steps {
        let mut rng = SplitMix64::stream(config.seed, t as u64);
        let sub = sample_failures(&config.graph, config.p, &mut rng)?;
        for (ci, pos) in col.iter_mut().zip(&x) {
            *ci = pos[0];
        }
        compute_blocks_into(&col, &sub, &mut intervals, &mut blocks);
        ledger.record_blocks(&blocks);
        rows.push(SwarmStepRow {
            t,
            max_block: blocks.iter().map(Block::length).fold(0.0, f64::max),
            max_edge: sub
                .edges()
                .iter()
                .map(|&(i, j)| (col[i] - col[j]).abs())
                .fold(0.0, f64::max),
            diameter: x_diameter(&x),
            q_norm_sq: q_norm_sq(&q, &col),
            retained_edges: sub.edge_count(),
        });

        let prev = x.clone();
        for (i, pos) in x.iter_mut().enumerate() {
            if weights[i] == 0.0 {
                continue;
            }
            for &j in sub.neighbors(i) {
                for c in 0..3 {
                    pos[c] += weights[i] * (prev[j][c] - prev[i][c]);
                }
            }
        }
        trajectory.push(x.clone());
    }

    let diameters: Vec<f64> = trajectory.iter().map(|state| x_diameter(state)).collect();
    let stats = convergence_stats(&rows, &diameters, &config.alphas);
    Ok(SwarmRun {
        nu: n,
        roles,
        mirror: (0..n).collect(),
        weights,
        q,
        rho,
        max_degree: config.graph.max_degree(),
        p: config.p,
        trajectory,
        rows,
        ledger,
        stats,
    })
}

/// Worst-case alignment-time bound d^2 n^4 / (p^3 rho^2) * ln(n / (rho eps)),
/// scaled by the caller's constant multiplier.
pub fn theorem4_bound(
    n: usize,
    d: usize,
    p: f64,
    rho: f64,
    eps: f64,
    multiplier: f64,
) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParameter {
            name: "n",
            value: 0.0,
            constraint: "agent count must be at least 1",
        });
    }
    if d == 0 {
        return Err(Error::InvalidParameter {
            name: "d",
            value: 0.0,
            constraint: "max degree must be at least 1",
        });
    }
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::InvalidParameter {
            name: "p",
            value: p,
            constraint: "retention probability must lie in (0, 1]",
        });
    }
    validate_rho(rho)?;
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParameter {
            name: "eps",
            value: eps,
            constraint: "alignment distance must lie in (0, 1)",
        });
    }
    if !(multiplier > 0.0 && multiplier.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "multiplier",
            value: multiplier,
            constraint: "multiplier must be positive and finite",
        });
    }
    let nf = n as f64;
    let df = d as f64;
    Ok(multiplier * (df * df * nf.powi(4) / (p.powi(3) * rho * rho)) * (nf / (rho * eps)).ln())
}

/// rows x cols grid with the first and last columns pinned onto the plane
/// X = 0 (Z = 0 and Z = 1 respectively, Y by grid row); free vertices start
/// uniformly inside the unit cube.
pub fn grid_scenario(
    rows: usize,
    cols: usize,
    p: f64,
    seed: u64,
    steps: usize,
) -> Result<SwarmConfig> {
    if rows < 2 || cols < 3 {
        return Err(Error::InvalidParameter {
            name: "grid",
            value: (rows * cols) as f64,
            constraint: "need at least 2 rows and 3 columns",
        });
    }
    let graph = WeightedGraph::grid(rows, cols);
    let mut pinned = Vec::with_capacity(2 * rows);
    let mut x0 = vec![[0.0; 3]; rows * cols];
    let mut rng = SplitMix64::stream(seed, INITIAL_CONDITION_STREAM);
    for r in 0..rows {
        for c in 0..cols {
            let v = r * cols + c;
            if c == 0 || c == cols - 1 {
                pinned.push(v);
                let y = r as f64 / (rows - 1) as f64;
                let z = if c == 0 { 0.0 } else { 1.0 };
                x0[v] = [0.0, y, z];
            } else {
                x0[v] = [
                    rng.next_range(0.0, 1.0),
                    rng.next_range(0.0, 1.0),
                    rng.next_range(0.0, 1.0),
                ];
            }
        }
    }
    let mut config = SwarmConfig::new(graph, pinned, x0);
    config.p = p;
    config.seed = seed;
    config.steps = steps;
    Ok(config)
}

/// n-vertex path with its last vertex pinned at (0, 1/2, 1/2); free
/// vertices start uniformly inside the unit cube.
pub fn path_scenario(n: usize, p: f64, seed: u64, steps: usize) -> Result<SwarmConfig> {
    if n < 2 {
        return Err(Error::InvalidParameter {
            name: "n",
            value: n as f64,
            constraint: "path needs at least 2 vertices",
        });
    }
    let graph = WeightedGraph::path(n);
    let mut x0 = vec![[0.0; 3]; n];
    let mut rng = SplitMix64::stream(seed, INITIAL_CONDITION_STREAM);
    for pos in x0.iter_mut().take(n - 1) {
        *pos = [
            rng.next_range(0.0, 1.0),
            rng.next_range(0.0, 1.0),
            rng.next_range(0.0, 1.0),
        ];
    }
    x0[n - 1] = [0.0, 0.5, 0.5];
    let mut config = SwarmConfig::new(graph, vec![n - 1], x0);
    config.p = p;
    config.seed = seed;
    config.steps = steps;
    Ok(config)
}
