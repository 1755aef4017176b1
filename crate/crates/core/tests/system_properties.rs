//! Cross-checks the sparse averaging step, block computation, and variance
//! diagnostics against independent dense-matrix and flood-merge oracles.

mod common;

use common::{dense_apply, dense_from_rule, flood_merged_edge_intervals};
use proptest::prelude::*;
use ras_core::checks::{random_connected_graph, random_state, random_system, random_weights};
use ras_core::energy::compute_blocks;
use ras_core::system::EmbeddedState;
use ras_core::{
    build_system, check_cover_length, dirichlet_form, q_mean, q_norm_sq, step, variance,
    SplitMix64, WeightedGraph, BLOCK_MERGE_TOLERANCE,
};

#[test]
fn sparse_step_matches_dense_matrix_oracle() {
    let mut rng = SplitMix64::new(0x5eed_0001);
    for case in 0..1000 {
        let (graph, a, sys) = random_system(&mut rng, 50);
        let dense = dense_from_rule(&graph, &a);
        let x = random_state(&mut rng, graph.n());
        let sparse = sys.apply(&x.values);
        let oracle = dense_apply(&dense, &x.values);
        for (i, (got, want)) in sparse.iter().zip(&oracle).enumerate() {
            assert!(
                (got - want).abs() <= 1e-12,
                "case {case}: sparse and dense products disagree at {i}: {got} vs {want}"
            );
        }
    }
}

#[test]
fn norm_drop_dominates_half_the_dirichlet_form() {
    let mut rng = SplitMix64::new(0x5eed_0002);
    for case in 0..1000 {
        let (graph, a, sys) = random_system(&mut rng, 50);
        let dense = dense_from_rule(&graph, &a);
        let x = random_state(&mut rng, graph.n());
        let px = dense_apply(&dense, &x.values);
        let d = dirichlet_form(&x, &graph);
        let before = q_norm_sq(sys.q(), &x.values);
        let after = q_norm_sq(sys.q(), &px);
        assert!(
            after <= before - d / 2.0 + 1e-9,
            "case {case}: norm only fell {} against Dirichlet form {d}",
            before - after
        );
    }
}

#[test]
fn two_agent_drop_is_exactly_half_the_dirichlet_form() {
    let graph = WeightedGraph::path(2);
    let sys = build_system(&graph, &[0.5, 0.5]).expect("half weights are valid for a pair");
    let x = EmbeddedState::new(vec![0.0, 1.0]);
    let before = q_norm_sq(sys.q(), &x.values);
    let after = q_norm_sq(sys.q(), &step(&x, &sys).expect("step").values);
    let d = dirichlet_form(&x, &graph);
    assert!((before - 2.0).abs() < 1e-15, "before-norm should be 2, got {before}");
    assert!((after - 1.0).abs() < 1e-15, "after-norm should be 1, got {after}");
    assert!((d - 2.0).abs() < 1e-15, "Dirichlet form should be 2, got {d}");
    assert!(
        ((before - after) - d / 2.0).abs() < 1e-15,
        "pair drop should equal exactly half the Dirichlet form"
    );
}

#[test]
fn q_mean_is_conserved_over_long_switching_runs() {
    let mut rng = SplitMix64::new(0x5eed_0003);
    let n = 20;
    // One weight vector shared by every graph keeps q fixed across switches.
    let a: Vec<f64> = (0..n).map(|_| rng.next_range(0.2, 1.0) / n as f64).collect();
    let mut x = random_state(&mut rng, n);
    let q: Vec<f64> = a.iter().map(|ai| 1.0 / ai).collect();
    let mean0 = q_mean(&q, &x.values);
    let graphs: Vec<WeightedGraph> = (0..5).map(|_| random_connected_graph(&mut rng, n)).collect();
    let systems: Vec<_> = graphs
        .iter()
        .map(|g| build_system(g, &a).expect("weights below 1/n fit every graph"))
        .collect();
    for t in 0..10_000 {
        x = step(&x, &systems[t % systems.len()]).expect("step");
    }
    let drift = (q_mean(&q, &x.values) - mean0).abs();
    assert!(drift <= 1e-10, "q-mean drifted by {drift} over 10^4 steps");
}

#[test]
fn telescoped_norm_drop_dominates_half_the_dirichlet_sum() {
    let mut rng = SplitMix64::new(0x5eed_0004);
    for case in 0..50 {
        let n = 3 + rng.next_below(18);
        let a: Vec<f64> = (0..n).map(|_| rng.next_range(0.2, 1.0) / n as f64).collect();
        let q: Vec<f64> = a.iter().map(|ai| 1.0 / ai).collect();
        let mut x = random_state(&mut rng, n);
        let first = q_norm_sq(&q, &x.values);
        let mut dirichlet_sum = 0.0;
        for _ in 0..40 {
            let graph = random_connected_graph(&mut rng, n);
            let sys = build_system(&graph, &a).expect("weights below 1/n fit every graph");
            dirichlet_sum += dirichlet_form(&x, &graph);
            x = step(&x, &sys).expect("step");
        }
        let drop = first - q_norm_sq(&q, &x.values);
        assert!(
            drop >= dirichlet_sum / 2.0 - 1e-9,
            "case {case}: drop {drop} below half the Dirichlet sum {dirichlet_sum}"
        );
    }
}

#[test]
fn two_agent_cover_length_certificate() {
    let graph = WeightedGraph::path(2);
    let sys = build_system(&graph, &[0.5, 0.5]).expect("half weights are valid for a pair");
    let x = EmbeddedState::new(vec![0.0, 1.0]);
    let report = check_cover_length(std::slice::from_ref(&x), &[&graph], sys.q(), sys.rho());
    assert_eq!(report.t_c, 1, "a single merging step covers at time 1");
    assert!(report.connected, "the pair edge connects the pair");
    let var = variance(sys.q(), &x.values);
    assert!((var - 1.0).abs() < 1e-15, "q-variance of (0,1) should be 1, got {var}");
    assert!(
        (report.variance_bound - 0.125).abs() < 1e-15,
        "rho/n^2 * variance should be 1/8, got {}",
        report.variance_bound
    );
    assert!(
        (report.dirichlet_sum - 2.0).abs() < 1e-15,
        "Dirichlet sum should be 2, got {}",
        report.dirichlet_sum
    );
    assert_eq!(report.holds, Some(true), "the covering inequality must hold");
}

/// All vertex pairs on `n` vertices, for subset-style edge strategies.
fn all_pairs(n: usize) -> Vec<(usize, usize)> {
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            pairs.push((i, j));
        }
    }
    pairs
}

proptest! {
    #[test]
    fn blocks_match_the_flood_merge_oracle(
        n in 2usize..12,
        edge_mask in any::<u64>(),
        seed in any::<u64>(),
    ) {
        let pairs = all_pairs(n);
        let edges: Vec<(usize, usize)> = pairs
            .iter()
            .enumerate()
            .filter(|(k, _)| edge_mask >> (k % 64) & 1 == 1)
            .map(|(_, &e)| e)
            .collect();
        let graph = WeightedGraph::new(n, &edges).expect("subset of distinct pairs");
        let mut rng = SplitMix64::new(seed);
        // Coarse values make exact endpoint collisions common, exercising merges.
        let values: Vec<f64> = (0..n).map(|_| rng.next_below(8) as f64 / 4.0).collect();
        let state = EmbeddedState::new(values.clone());
        let blocks = compute_blocks(&state, &graph);
        let oracle = flood_merged_edge_intervals(&values, &graph, BLOCK_MERGE_TOLERANCE);
        prop_assert_eq!(
            blocks.len(),
            oracle.len(),
            "block count disagrees with flood-merge oracle"
        );
        for (b, &(lo, hi)) in blocks.iter().zip(&oracle) {
            prop_assert_eq!(b.lo, lo, "block lower endpoint disagrees with oracle");
            prop_assert_eq!(b.hi, hi, "block upper endpoint disagrees with oracle");
        }
        for w in blocks.windows(2) {
            prop_assert!(
                w[1].lo > w[0].hi + BLOCK_MERGE_TOLERANCE,
                "adjacent blocks [{}, {}] and [{}, {}] should not touch",
                w[0].lo, w[0].hi, w[1].lo, w[1].hi
            );
        }
    }

    #[test]
    fn averaging_step_stays_in_the_hull_and_keeps_the_q_mean(seed in any::<u64>()) {
        let mut rng = SplitMix64::new(seed);
        let n = 2 + rng.next_below(19);
        let graph = random_connected_graph(&mut rng, n);
        let a = random_weights(&mut rng, &graph);
        let sys = build_system(&graph, &a).expect("generated weights are valid");
        let x = random_state(&mut rng, n);
        let px = sys.apply(&x.values);
        let lo = x.values.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = x.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        for (i, v) in px.iter().enumerate() {
            prop_assert!(
                *v >= lo - 1e-12 && *v <= hi + 1e-12,
                "coordinate {i} left the hull [{lo}, {hi}]: {v}"
            );
        }
        let drift = (q_mean(sys.q(), &px) - q_mean(sys.q(), &x.values)).abs();
        prop_assert!(drift <= 1e-12, "q-mean moved by {drift} in one step");
    }
}
