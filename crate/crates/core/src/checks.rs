//! Randomized invariant suites over generated instances: norm drops,
//! stochasticity, mean conservation, convexity, covering inequalities, and
//! mirror antisymmetry. Each suite returns a report; the CLI surfaces them.

use crate::diagnostics::check_cover_length;
use crate::energy::dirichlet_form;
use crate::error::Result;
use crate::graph::WeightedGraph;
use crate::rng::SplitMix64;
use crate::swarm::{path_scenario, run_swarm, VertexRole};
use crate::system::{build_system, q_mean, q_norm_sq, variance, EmbeddedState, ReversibleSystem};

/// Outcome of one randomized suite.
#[derive(Debug, Clone)]
pub struct CheckReport {
    pub name: &'static str,
    pub cases: usize,
    pub failures: usize,
    /// Worst defect observed (suite-specific; compare to `tolerance`).
    pub worst: f64,
    pub tolerance: f64,
    /// Human-readable note about the worst case.
    pub detail: String,
}

impl CheckReport {
    /// A suite passes when no case exceeded its tolerance.
    #[must_use]
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// Random connected graph: a random spanning tree plus a few extra edges.
pub fn random_connected_graph(rng: &mut SplitMix64, n: usize) -> WeightedGraph {
    assert!(n >= 2, "a connected test graph needs at least 2 vertices");
    let mut edges = Vec::with_capacity(n + n / 2);
    for i in 1..n {
        edges.push((rng.next_below(i), i));
    }
    let tree = WeightedGraph::new(n, &edges).expect("tree edges are valid");
    for _ in 0..n / 2 {
        let i = rng.next_below(n);
        let j = rng.next_below(n);
        if i != j && !tree.has_edge(i, j) && !edges.contains(&(i.min(j), i.max(j))) {
            edges.push((i.min(j), i.max(j)));
        }
    }
    WeightedGraph::new(n, &edges).expect("deduplicated edges are valid")
}

/// Random valid weights: a_i strictly inside (0, 1/(degree_i + 1)).
pub fn random_weights(rng: &mut SplitMix64, graph: &WeightedGraph) -> Vec<f64> {
    (0..graph.n())
        .map(|i| rng.next_range(0.2, 0.995) / (graph.degree(i) + 1) as f64)
        .collect()
}

/// Random embedding with coordinates uniform in [-1, 1].
pub fn random_state(rng: &mut SplitMix64, n: usize) -> EmbeddedState {
    EmbeddedState::new((0..n).map(|_| rng.next_range(-1.0, 1.0)).collect())
}

/// Random system on 2..=max_n vertices, with its weights.
pub fn random_system(
    rng: &mut SplitMix64,
    max_n: usize,
) -> (WeightedGraph, Vec<f64>, ReversibleSystem) {
    let n = 2 + rng.next_below(max_n.max(3) - 1);
    let graph = random_connected_graph(rng, n);
    let a = random_weights(rng, &graph);
    let sys = build_system(&graph, &a).expect("generated weights are valid");
    (graph, a, sys)
}

/// One averaging step must drop the squared q-norm by at least half the
/// Dirichlet form of the starting state.
pub fn dirichlet_drop_suite(seed: u64, cases: usize, max_n: usize) -> CheckReport {
    let mut rng = SplitMix64::stream(seed, 1);
    let tolerance = 1e-9;
    let mut failures = 0;
    let mut worst = f64::NEG_INFINITY;
    let mut detail = String::new();
    for _ in 0..cases {
        let (graph, _, sys) = random_system(&mut rng, max_n);
        let x = random_state(&mut rng, graph.n());
        let before = q_norm_sq(sys.q(), &x.values);
        let after = q_norm_sq(sys.q(), &sys.apply(&x.values));
        let drop_floor = dirichlet_form(&x, &graph) / 2.0;
        let defect = after - (before - drop_floor);
        if defect > worst {
            worst = defect;
            detail = format!("n = {}, defect {defect:.3e}", graph.n());
        }
        if defect > tolerance {
            failures += 1;
        }
    }
    CheckReport {
        name: "dirichlet-drop",
        cases,
        failures,
        worst,
        tolerance,
        detail,
    }
}

/// Rows must sum to one, entries must be nonnegative, every positive entry
/// must be at least the smallest weight, and detailed balance must be exact.
pub fn stochasticity_suite(seed: u64, cases: usize, max_n: usize) -> CheckReport {
    let mut rng = SplitMix64::stream(seed, 2);
    let tolerance = 1e-12;
    let mut failures = 0;
    let mut worst = f64::NEG_INFINITY;
    let mut detail = String::new();
    for _ in 0..cases {
        let (graph, a, sys) = random_system(&mut rng, max_n);
        let rho = a.iter().copied().fold(f64::INFINITY, f64::min);
        let mut defect = sys.row_sum_error().max(sys.detailed_balance_error());
        defect = defect.max(rho - sys.min_positive_entry());
        if defect > worst {
            worst = defect;
            detail = format!("n = {}, defect {defect:.3e}", graph.n());
        }
        if defect > tolerance {
            failures += 1;
        }
    }
    CheckReport {
        name: "stochasticity",
        cases,
        failures,
        worst,
        tolerance,
        detail,
    }
}

/// The q-weighted mean is conserved by every step, including steps that
/// switch to a sparser graph under the same weights.
pub fn mean_conservation_suite(seed: u64, cases: usize, max_n: usize) -> CheckReport {
    let mut rng = SplitMix64::stream(seed, 3);
    let tolerance = 1e-12;
    let mut failures = 0;
    let mut worst = f64::NEG_INFINITY;
    let mut detail = String::new();
    for _ in 0..cases {
        let (graph, a, sys) = random_system(&mut rng, max_n);
        // Drop a random suffix of edges; degrees only fall, weights stay valid.
        let keep = 1 + rng.next_below(graph.edge_count());
        let sparse = WeightedGraph::new(graph.n(), &graph.edges()[..keep])
            .expect("edge prefix is valid");
        let sparse_sys = build_system(&sparse, &a).expect("weights remain valid");
        let mut x = random_state(&mut rng, graph.n()).values;
        let mean0 = q_mean(sys.q(), &x);
        for _ in 0..5 {
            x = sys.apply(&x);
            x = sparse_sys.apply(&x);
        }
        let defect = (q_mean(sys.q(), &x) - mean0).abs();
        if defect > worst {
            worst = defect;
            detail = format!("n = {}, drift {defect:.3e}", graph.n());
        }
        if defect > tolerance {
            failures += 1;
        }
    }
    CheckReport {
        name: "mean-conservation",
        cases,
        failures,
        worst,
        tolerance,
        detail,
    }
}

/// Averaging never leaves the interval hull of the previous state.
pub fn convexity_suite(seed: u64, cases: usize, max_n: usize) -> CheckReport {
    let mut rng = SplitMix64::stream(seed, 4);
    let tolerance = 1e-12;
    let mut failures = 0;
    let mut worst = f64::NEG_INFINITY;
    let mut detail = String::new();
    for _ in 0..cases {
        let (graph, _, sys) = random_system(&mut rng, max_n);
        let x = random_state(&mut rng, graph.n()).values;
        let lo = x.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let y = sys.apply(&x);
        let defect = y
            .iter()
            .map(|&v| (lo - v).max(v - hi))
            .fold(f64::NEG_INFINITY, f64::max);
        if defect > worst {
            worst = defect;
            detail = format!("n = {}, overshoot {defect:.3e}", graph.n());
        }
        if defect > tolerance {
            failures += 1;
        }
    }
    CheckReport {
        name: "convexity",
        cases,
        failures,
        worst,
        tolerance,
        detail,
    }
}

/// Over any window whose cumulative union connects the agents, the summed
/// Dirichlet forms must cover a fixed fraction of the initial variance, and
/// the telescoped q-norm drop must cover half of that.
pub fn cover_length_suite(seed: u64, cases: usize, max_n: usize) -> Result<CheckReport> {
    let mut rng = SplitMix64::stream(seed, 5);
    let tolerance = 1e-9;
    let mut failures = 0;
    let mut worst = f64::NEG_INFINITY;
    let mut detail = String::new();
    for _ in 0..cases {
        let n = 3 + rng.next_below(max_n.max(4) - 2);
        let full = random_connected_graph(&mut rng, n);
        let a = random_weights(&mut rng, &full);
        let rho = a.iter().copied().fold(f64::INFINITY, f64::min);
        let sys_full = build_system(&full, &a)?;
        let q = sys_full.q().to_vec();

        // Scatter the edges over a short schedule; the union stays connected.
        let slots = 2 + rng.next_below(4);
        let mut edge_lists: Vec<Vec<(usize, usize)>> = vec![Vec::new(); slots];
        for &e in full.edges() {
            edge_lists[rng.next_below(slots)].push(e);
        }
        let graphs: Vec<WeightedGraph> = edge_lists
            .iter()
            .map(|edges| WeightedGraph::new(n, edges))
            .collect::<Result<_>>()?;
        let graph_refs: Vec<&WeightedGraph> = graphs.iter().collect();

        let mut states = vec![random_state(&mut rng, n)];
        for g in &graphs {
            let sys = build_system(g, &a)?;
            let prev = states.last().expect("seeded with the initial state");
            states.push(EmbeddedState::new(sys.apply(&prev.values)));
        }

        let report = check_cover_length(&states, &graph_refs, &q, rho);
        let cover_defect = if report.holds == Some(true) {
            report.variance_bound - report.dirichlet_sum
        } else {
            f64::INFINITY
        };
        let telescoped = q_norm_sq(&q, &states[0].values)
            - q_norm_sq(&q, &states[report.t_c].values);
        let nf = n as f64;
        let telescope_floor = rho / (2.0 * nf * nf) * variance(&q, &states[0].values);
        let defect = cover_defect.max(telescope_floor - telescoped);
        if defect > worst {
            worst = defect;
            detail = format!("n = {n}, slots = {slots}, defect {defect:.3e}");
        }
        if defect > tolerance {
            failures += 1;
        }
    }
    Ok(CheckReport {
        name: "cover-length",
        cases,
        failures,
        worst,
        tolerance,
        detail,
    })
}

/// Mirror-doubled swarms keep X exactly antisymmetric and anchors on the
/// plane, pathwise under shared failure coins.
pub fn antisymmetry_suite(seed: u64, cases: usize) -> Result<CheckReport> {
    let mut rng = SplitMix64::stream(seed, 6);
    let tolerance = 1e-12;
    let mut failures = 0;
    let mut worst = f64::NEG_INFINITY;
    let mut detail = String::new();
    for case in 0..cases {
        let n = 3 + rng.next_below(6);
        let p = rng.next_range(0.4, 1.0);
        let config = path_scenario(n, p, seed.wrapping_add(case as u64), 50)?;
        let run = run_swarm(&config)?;
        let mut defect = f64::NEG_INFINITY;
        for state in &run.trajectory {
            for (v, pos) in state.iter().enumerate() {
                let d = match run.roles[v] {
                    VertexRole::Pinned => pos[0].abs(),
                    _ => (pos[0] + state[run.mirror[v]][0]).abs(),
                };
                defect = defect.max(d);
            }
        }
        if defect > worst {
            worst = defect;
            detail = format!("n = {n}, p = {p:.2}, defect {defect:.3e}");
        }
        if defect > tolerance {
            failures += 1;
        }
    }
    Ok(CheckReport {
        name: "antisymmetry",
        cases,
        failures,
        worst,
        tolerance,
        detail,
    })
}

/// Runs every suite at its default size.
pub fn all_checks(seed: u64) -> Result<Vec<CheckReport>> {
    Ok(vec![
        dirichlet_drop_suite(seed, 200, 20),
        stochasticity_suite(seed, 200, 20),
        mean_conservation_suite(seed, 200, 20),
        convexity_suite(seed, 200, 20),
        cover_length_suite(seed, 100, 12)?,
        antisymmetry_suite(seed, 20)?,
    ])
}
