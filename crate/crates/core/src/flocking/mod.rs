//! Velocity-averaging flocking with a hysteresis network rule: birds within
//! range stay linked, and a new link additionally requires the velocities to
//! disagree by more than a threshold.

pub mod analysis;
pub mod trace;

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::rng::SplitMix64;
use crate::system::build_system;

/// Largest bird count for which full history recording is supported.
pub const HISTORY_BIRD_CAP: usize = 256;

/// Euclidean norm of a 3-vector.
pub fn norm3(v: &[f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

fn sub3(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

/// Run parameters for one flocking scenario.
#[derive(Debug, Clone)]
pub struct FlockConfig {
    pub n: usize,
    /// Interaction radius in (0, 1].
    pub r: f64,
    /// Velocity-gap threshold a new edge must exceed.
    pub eps_o: f64,
    /// Per-bird averaging weight; 0 < a_i <= 1/n keeps every step's matrix
    /// valid no matter how dense the network gets.
    pub a: Vec<f64>,
    pub max_steps: usize,
    /// Optional lock threshold: when set, an out-of-range edge is only
    /// deleted while the velocity gap still exceeds it.
    pub theta: Option<f64>,
}

impl FlockConfig {
    /// Uniform weights a_i = 1/n.
    pub fn uniform(n: usize, r: f64, eps_o: f64, max_steps: usize) -> Self {
        Self {
            n,
            r,
            eps_o,
            a: vec![1.0 / n as f64; n],
            max_steps,
            theta: None,
        }
    }

    // Negated comparisons so that NaN parameters are rejected too.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidParameter {
                name: "n",
                value: 0.0,
                constraint: "need at least one bird",
            });
        }
        if !(self.r > 0.0 && self.r <= 1.0) {
            return Err(Error::InvalidParameter {
                name: "r",
                value: self.r,
                constraint: "interaction radius must lie in (0, 1]",
            });
        }
        if !(self.eps_o > 0.0) {
            return Err(Error::InvalidParameter {
                name: "eps_o",
                value: self.eps_o,
                constraint: "hysteresis threshold must be positive",
            });
        }
        if self.a.len() != self.n {
            return Err(Error::DimensionMismatch {
                name: "a",
                expected: self.n,
                got: self.a.len(),
            });
        }
        let cap = 1.0 / self.n as f64;
        for &ai in &self.a {
            if !(ai > 0.0 && ai <= cap + 1e-15) {
                return Err(Error::InvalidParameter {
                    name: "a",
                    value: ai,
                    constraint: "per-bird weight must lie in (0, 1/n]",
                });
            }
        }
        if let Some(theta) = self.theta {
            if !(theta > 0.0) {
                return Err(Error::InvalidParameter {
                    name: "theta",
                    value: theta,
                    constraint: "lock threshold must be positive when set",
                });
            }
        }
        Ok(())
    }

    /// Smallest weight; the entry floor of every step's matrix.
    pub fn rho(&self) -> f64 {
        self.a.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Per-bird masses q_i = 1/a_i (graph-independent).
    pub fn q(&self) -> Vec<f64> {
        self.a.iter().map(|&ai| 1.0 / ai).collect()
    }

    /// Speed cap sqrt(rho/n) enforced on initial velocities.
    pub fn speed_cap(&self) -> f64 {
        (self.rho() / self.n as f64).sqrt()
    }
}

/// Positions, velocities, and the current network at one time step.
#[derive(Debug, Clone)]
pub struct FlockState {
    pub t: usize,
    pub x: Vec<[f64; 3]>,
    pub v: Vec<[f64; 3]>,
    pub graph: WeightedGraph,
}

impl FlockState {
    /// Connected components of the current network, each sorted ascending.
    pub fn flocks(&self) -> Vec<Vec<usize>> {
        self.graph.component_members()
    }
}

/// Result of applying the hysteresis rule at one step.
#[derive(Debug, Clone)]
pub struct NetworkUpdate {
    pub graph: WeightedGraph,
    pub created: Vec<(usize, usize)>,
    pub deleted: Vec<(usize, usize)>,
}

impl NetworkUpdate {
    pub fn changed(&self) -> bool {
        !self.created.is_empty() || !self.deleted.is_empty()
    }
}

/// Applies the hysteresis rule: existing edges persist while the distance
/// stays within r (or, with a lock threshold, while the gap stays locked);
/// a new edge needs distance <= r and velocity gap strictly above eps_o.
pub fn update_network(
    prev: &WeightedGraph,
    x: &[[f64; 3]],
    v: &[[f64; 3]],
    config: &FlockConfig,
) -> NetworkUpdate {
    let n = config.n;
    let mut edges = Vec::new();
    let mut created = Vec::new();
    let mut deleted = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let dist = norm3(&sub3(&x[i], &x[j]));
            let had = prev.has_edge(i, j);
            let keep = if had {
                match config.theta {
                    None => dist <= config.r,
                    Some(theta) => dist <= config.r || norm3(&sub3(&v[i], &v[j])) <= theta,
                }
            } else {
                dist <= config.r && norm3(&sub3(&v[i], &v[j])) > config.eps_o
            };
            if keep {
                edges.push((i, j));
                if !had {
                    created.push((i, j));
                }
            } else if had {
                deleted.push((i, j));
            }
        }
    }
    let graph = WeightedGraph::new(n, &edges).expect("pairs over [n] are valid edges");
    NetworkUpdate {
        graph,
        created,
        deleted,
    }
}

/// The network formed at time 0 (from an empty predecessor; not a switch).
pub fn initial_network(x: &[[f64; 3]], v: &[[f64; 3]], config: &FlockConfig) -> WeightedGraph {
    update_network(&WeightedGraph::empty(config.n), x, v, config).graph
}

/// One step: v(t+1) = P_t v(t) per coordinate, x(t+1) = x(t) + v(t+1), then
/// the network is updated from the new positions and velocities.
pub fn vcs_step(state: &FlockState, config: &FlockConfig) -> Result<(FlockState, NetworkUpdate)> {
    let sys = build_system(&state.graph, &config.a)?;
    let n = config.n;
    let v_new: Vec<[f64; 3]> = (0..n)
        .map(|i| {
            let (row, diag) = sys.row(i);
            let mut acc = [
                diag * state.v[i][0],
                diag * state.v[i][1],
                diag * state.v[i][2],
            ];
            for &(j, w) in row {
                acc[0] += w * state.v[j][0];
                acc[1] += w * state.v[j][1];
                acc[2] += w * state.v[j][2];
            }
            acc
        })
        .collect();
    let x_new: Vec<[f64; 3]> = state
        .x
        .iter()
        .zip(&v_new)
        .map(|(x, v)| [x[0] + v[0], x[1] + v[1], x[2] + v[2]])
        .collect();
    let update = update_network(&state.graph, &x_new, &v_new, config);
    let next = FlockState {
        t: state.t + 1,
        x: x_new,
        v: v_new,
        graph: update.graph.clone(),
    };
    Ok((next, update))
}

/// One network change: the step at which it happened and the edges involved.
#[derive(Debug, Clone)]
pub struct SwitchEvent {
    pub t: usize,
    pub created: Vec<(usize, usize)>,
    pub deleted: Vec<(usize, usize)>,
}

/// All network changes of a run, in time order.
#[derive(Debug, Clone, Default)]
pub struct SwitchLog {
    pub events: Vec<SwitchEvent>,
}

impl SwitchLog {
    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn times(&self) -> Vec<usize> {
        self.events.iter().map(|e| e.t).collect()
    }

    /// Time of the last change; 0 for a run whose network never changed.
    pub fn last_switch_time(&self) -> usize {
        self.events.last().map_or(0, |e| e.t)
    }
}

/// Dense per-step record of a run, with the network timeline compressed to
/// one stored graph per change.
#[derive(Debug, Clone)]
pub struct FlockHistory {
    pub x: Vec<Vec<[f64; 3]>>,
    pub v: Vec<Vec<[f64; 3]>>,
    graphs: Vec<WeightedGraph>,
    graph_index: Vec<usize>,
}

impl FlockHistory {
    /// Number of recorded times (steps + 1).
    pub fn len(&self) -> usize {
        self.graph_index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graph_index.is_empty()
    }

    /// The network in force at time t.
    pub fn graph_at(&self, t: usize) -> &WeightedGraph {
        &self.graphs[self.graph_index[t]]
    }

    fn push(&mut self, x: Vec<[f64; 3]>, v: Vec<[f64; 3]>, graph: &WeightedGraph, changed: bool) {
        self.x.push(x);
        self.v.push(v);
        if changed || self.graphs.is_empty() {
            self.graphs.push(graph.clone());
        }
        self.graph_index.push(self.graphs.len() - 1);
    }
}

/// A flocking run in progress: current state, switch log, optional history.
#[derive(Debug, Clone)]
pub struct FlockRun {
    pub config: FlockConfig,
    pub state: FlockState,
    pub switches: SwitchLog,
    pub history: Option<FlockHistory>,
}

impl FlockRun {
    /// Starts a history-recording run; enforces the initial normalization
    /// (positions in the unit ball, speeds within sqrt(rho/n)) and the
    /// recording cap on n.
    pub fn new(config: FlockConfig, x0: Vec<[f64; 3]>, v0: Vec<[f64; 3]>) -> Result<Self> {
        if config.n > HISTORY_BIRD_CAP {
            return Err(Error::InvalidParameter {
                name: "n",
                value: config.n as f64,
                constraint: "history-recording runs support at most 256 birds",
            });
        }
        Self::start(config, x0, v0, true)
    }

    /// Starts a run that keeps only the current state (no backward tracing).
    pub fn without_history(
        config: FlockConfig,
        x0: Vec<[f64; 3]>,
        v0: Vec<[f64; 3]>,
    ) -> Result<Self> {
        Self::start(config, x0, v0, false)
    }

    fn start(
        config: FlockConfig,
        x0: Vec<[f64; 3]>,
        v0: Vec<[f64; 3]>,
        record: bool,
    ) -> Result<Self> {
        config.validate()?;
        if x0.len() != config.n {
            return Err(Error::DimensionMismatch {
                name: "x0",
                expected: config.n,
                got: x0.len(),
            });
        }
        if v0.len() != config.n {
            return Err(Error::DimensionMismatch {
                name: "v0",
                expected: config.n,
                got: v0.len(),
            });
        }
        for p in &x0 {
            if norm3(p) > 1.0 {
                return Err(Error::InvalidParameter {
                    name: "x0",
                    value: norm3(p),
                    constraint: "initial positions must lie in the unit ball",
                });
            }
        }
        let cap = config.speed_cap();
        for w in &v0 {
            if norm3(w) > cap {
                return Err(Error::InvalidParameter {
                    name: "v0",
                    value: norm3(w),
                    constraint: "initial speeds must not exceed sqrt(rho/n)",
                });
            }
        }
        // The time-0 network forms from scratch; its creations are not
        // switches because there is no prior network to change.
        let graph = initial_network(&x0, &v0, &config);
        let state = FlockState {
            t: 0,
            x: x0,
            v: v0,
            graph,
        };
        let history = record.then(|| {
            let mut h = FlockHistory {
                x: Vec::new(),
                v: Vec::new(),
                graphs: Vec::new(),
                graph_index: Vec::new(),
            };
            h.push(state.x.clone(), state.v.clone(), &state.graph, true);
            h
        });
        Ok(Self {
            config,
            state,
            switches: SwitchLog::default(),
            history,
        })
    }

    /// Advances one step; returns whether the network changed.
    pub fn advance(&mut self) -> Result<bool> {
        let (next, update) = vcs_step(&self.state, &self.config)?;
        let changed = update.changed();
        if changed {
            self.switches.events.push(SwitchEvent {
                t: next.t,
                created: update.created,
                deleted: update.deleted,
            });
        }
        if let Some(h) = self.history.as_mut() {
            h.push(next.x.clone(), next.v.clone(), &next.graph, changed);
        }
        self.state = next;
        Ok(changed)
    }

    /// Advances `steps` steps (or until max_steps).
    pub fn run(&mut self, steps: usize) -> Result<()> {
        for _ in 0..steps {
            if self.state.t >= self.config.max_steps {
                break;
            }
            self.advance()?;
        }
        Ok(())
    }

    /// Runs until the network has been unchanged for `quiet_tail` steps or
    /// max_steps is hit; returns whether the quiet tail was achieved.
    pub fn run_until_quiescent(&mut self, quiet_tail: usize) -> Result<bool> {
        loop {
            let last = self.switches.last_switch_time();
            if self.state.t >= last + quiet_tail {
                return Ok(true);
            }
            if self.state.t >= self.config.max_steps {
                return Ok(false);
            }
            self.advance()?;
        }
    }
}

/// Samples positions uniformly in the unit ball and velocities uniformly in
/// the ball of radius sqrt(rho/n), deterministically from the seed.
pub fn sample_initial_conditions(
    config: &FlockConfig,
    seed: u64,
) -> (Vec<[f64; 3]>, Vec<[f64; 3]>) {
    let mut rng = SplitMix64::new(seed);
    let x = (0..config.n).map(|_| rng.next_in_ball(1.0)).collect();
    let cap = config.speed_cap();
    let v = (0..config.n).map(|_| rng.next_in_ball(cap)).collect();
    (x, v)
}

/// q-weighted mean velocity over a member list.
pub fn flock_q_mean_velocity(members: &[usize], v: &[[f64; 3]], q: &[f64]) -> [f64; 3] {
    let mut acc = [0.0; 3];
    let mut mass = 0.0;
    for &i in members {
        mass += q[i];
        for c in 0..3 {
            acc[c] += q[i] * v[i][c];
        }
    }
    [acc[0] / mass, acc[1] / mass, acc[2] / mass]
}

/// Per-coordinate spread (max - min) of member velocities.
pub fn flock_velocity_diameters(members: &[usize], v: &[[f64; 3]]) -> [f64; 3] {
    let mut out = [0.0; 3];
    for c in 0..3 {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &i in members {
            lo = lo.min(v[i][c]);
            hi = hi.max(v[i][c]);
        }
        out[c] = if hi >= lo { hi - lo } else { 0.0 };
    }
    out
}

/// Largest per-coordinate velocity spread of a member list.
pub fn flock_velocity_diameter(members: &[usize], v: &[[f64; 3]]) -> f64 {
    let d = flock_velocity_diameters(members, v);
    d[0].max(d[1]).max(d[2])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_bird_config() -> FlockConfig {
        FlockConfig {
            n: 2,
            r: 0.5,
            eps_o: 0.05,
            a: vec![0.5, 0.5],
            max_steps: 1000,
            theta: None,
        }
    }

    #[test]
    fn far_apart_birds_never_link() {
        let config = two_bird_config();
        let x = vec![[0.0, 0.0, 0.0], [0.9, 0.0, 0.0]];
        let v = vec![[0.1, 0.0, 0.0], [-0.1, 0.0, 0.0]];
        let update = update_network(&WeightedGraph::empty(2), &x, &v, &config);
        assert_eq!(update.graph.edge_count(), 0);
    }

    #[test]
    fn close_but_agreeing_birds_stay_unlinked() {
        let config = two_bird_config();
        let x = vec![[0.0, 0.0, 0.0], [0.1, 0.0, 0.0]];
        let v = vec![[0.02, 0.0, 0.0], [0.0, 0.0, 0.0]];
        let update = update_network(&WeightedGraph::empty(2), &x, &v, &config);
        assert_eq!(
            update.graph.edge_count(),
            0,
            "gap 0.02 <= eps_o must not create an edge"
        );
    }

    #[test]
    fn linked_birds_with_zero_gap_keep_their_edge() {
        let config = two_bird_config();
        let prev = WeightedGraph::new(2, &[(0, 1)]).unwrap();
        let x = vec![[0.0, 0.0, 0.0], [0.1, 0.0, 0.0]];
        let v = vec![[0.01, 0.0, 0.0], [0.01, 0.0, 0.0]];
        let update = update_network(&prev, &x, &v, &config);
        assert!(update.graph.has_edge(0, 1), "retention is purely metric");
        assert!(!update.changed());
    }

    #[test]
    fn edges_drop_exactly_when_out_of_range() {
        let config = two_bird_config();
        let prev = WeightedGraph::new(2, &[(0, 1)]).unwrap();
        let x = vec![[0.0, 0.0, 0.0], [0.51, 0.0, 0.0]];
        let v = vec![[0.0, 0.0, 0.0], [0.0, 0.0, 0.0]];
        let update = update_network(&prev, &x, &v, &config);
        assert!(!update.graph.has_edge(0, 1));
        assert_eq!(update.deleted, vec![(0, 1)]);
    }

    #[test]
    fn lock_threshold_retains_out_of_range_agreeing_birds() {
        let mut config = two_bird_config();
        config.theta = Some(0.1);
        let prev = WeightedGraph::new(2, &[(0, 1)]).unwrap();
        let x = vec![[0.0, 0.0, 0.0], [0.6, 0.0, 0.0]];
        let v = vec![[0.01, 0.0, 0.0], [0.02, 0.0, 0.0]];
        let update = update_network(&prev, &x, &v, &config);
        assert!(
            update.graph.has_edge(0, 1),
            "locked velocities must hold the edge despite distance > r"
        );
    }

    #[test]
    fn averaging_step_matches_hand_computation() {
        let config = two_bird_config();
        let x = vec![[0.0, 0.0, 0.0], [0.1, 0.0, 0.0]];
        let v = vec![[0.1, 0.0, 0.0], [0.0, 0.0, 0.0]];
        let graph = WeightedGraph::new(2, &[(0, 1)]).unwrap();
        let state = FlockState { t: 0, x, v, graph };
        let (next, _) = vcs_step(&state, &config).unwrap();
        for i in 0..2 {
            assert!((next.v[i][0] - 0.05).abs() < 1e-15, "both average to 1/20");
        }
        assert!((next.x[0][0] - 0.05).abs() < 1e-15, "position uses the NEW velocity");
        assert!((next.x[1][0] - 0.15).abs() < 1e-15);
    }

    #[test]
    fn isolated_bird_coasts() {
        let config = FlockConfig::uniform(1, 0.5, 0.05, 10);
        let v0 = [config.speed_cap() / 2.0, 0.0, 0.0];
        let mut run = FlockRun::new(config, vec![[0.0; 3]], vec![v0]).unwrap();
        run.run(5).unwrap();
        assert_eq!(run.state.t, 5);
        assert!((run.state.v[0][0] - v0[0]).abs() < 1e-15);
        assert!((run.state.x[0][0] - 5.0 * v0[0]).abs() < 1e-14);
        assert!(run.switches.is_empty());
    }

    #[test]
    fn initial_linking_is_not_a_switch() {
        let config = two_bird_config();
        // Close together, large velocity gap: linked already at time 0.
        let x = vec![[0.0, 0.0, 0.0], [0.1, 0.0, 0.0]];
        let cap = config.speed_cap();
        let v = vec![[cap * 0.9, 0.0, 0.0], [-cap * 0.9, 0.0, 0.0]];
        assert!(norm3(&sub3(&v[0], &v[1])) > config.eps_o);
        let run = FlockRun::new(config, x, v).unwrap();
        assert!(run.state.graph.has_edge(0, 1));
        assert!(run.switches.is_empty(), "time-0 formation is not a change");
    }

    #[test]
    fn load_validation_rejects_bad_norms() {
        let config = two_bird_config();
        let far = vec![[2.0, 0.0, 0.0], [0.0, 0.0, 0.0]];
        let ok_v = vec![[0.0; 3]; 2];
        assert!(FlockRun::new(config.clone(), far, ok_v.clone()).is_err());
        let ok_x = vec![[0.0; 3], [0.3, 0.0, 0.0]];
        let fast = vec![[1.0, 0.0, 0.0], [0.0; 3]];
        assert!(FlockRun::new(config, ok_x, fast).is_err());
    }

    #[test]
    fn q_mean_velocity_is_conserved_across_switch_free_steps() {
        let config = FlockConfig::uniform(4, 0.8, 0.001, 100);
        let (x0, v0) = sample_initial_conditions(&config, 42);
        let mut run = FlockRun::new(config.clone(), x0, v0).unwrap();
        let q = config.q();
        for _ in 0..50 {
            let before: Vec<_> = run
                .state
                .flocks()
                .iter()
                .map(|f| (f.clone(), flock_q_mean_velocity(f, &run.state.v, &q)))
                .collect();
            let changed = run.advance().unwrap();
            if changed {
                continue;
            }
            for (members, mean) in before {
                let after = flock_q_mean_velocity(&members, &run.state.v, &q);
                for c in 0..3 {
                    assert!(
                        (after[c] - mean[c]).abs() < 1e-12,
                        "flock mean velocity must be conserved without switches"
                    );
                }
            }
        }
    }

    #[test]
    fn sampled_initial_conditions_pass_validation_and_are_deterministic() {
        let config = FlockConfig::uniform(10, 0.5, 0.05, 10);
        let (x1, v1) = sample_initial_conditions(&config, 7);
        let (x2, v2) = sample_initial_conditions(&config, 7);
        assert_eq!(x1, x2);
        assert_eq!(v1, v2);
        assert!(FlockRun::new(config.clone(), x1, v1).is_ok());
        let (x3, _) = sample_initial_conditions(&config, 8);
        assert_ne!(x2, x3, "different seeds must give different draws");
    }

    #[test]
    fn quiescence_detector_respects_the_budget() {
        let mut config = FlockConfig::uniform(2, 0.5, 0.05, 30);
        config.a = vec![0.5, 0.5];
        let x = vec![[0.0; 3], [0.1, 0.0, 0.0]];
        let v = vec![[0.0; 3]; 2];
        let mut run = FlockRun::new(config, x, v).unwrap();
        assert!(run.run_until_quiescent(20).unwrap());
        assert_eq!(run.state.t, 20);
        let mut run2 = FlockRun {
            config: run.config.clone(),
            ..run.clone()
        };
        run2.config.max_steps = 10;
        assert!(!run2.run_until_quiescent(100).unwrap(), "budget cuts the tail short");
    }
}
