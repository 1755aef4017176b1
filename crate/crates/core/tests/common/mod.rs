//! Independent oracles shared by the integration suites: dense matrix
//! application built straight from the row rules, and a flood-merge
//! interval union that shares no code path with the block computation.
#![allow(dead_code)]

use ras_core::WeightedGraph;

/// Dense averaging matrix built directly from the defining rule:
/// off-diagonal a_i on edges, diagonal 1 - a_i * degree_i.
pub fn dense_from_rule(graph: &WeightedGraph, a: &[f64]) -> Vec<Vec<f64>> {
    let n = graph.n();
    let mut m = vec![vec![0.0; n]; n];
    for i in 0..n {
        m[i][i] = 1.0 - a[i] * graph.degree(i) as f64;
        for &j in graph.neighbors(i) {
            m[i][j] = a[i];
        }
    }
    m
}

/// Plain O(n^2) dense matrix-vector product.
pub fn dense_apply(m: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    m.iter()
        .map(|row| row.iter().zip(x).map(|(mij, xj)| mij * xj).sum())
        .collect()
}

/// Union of the edge intervals of `values` under `graph`, computed by
/// repeated pairwise flood-merging rather than a sorted sweep.
pub fn flood_merged_edge_intervals(
    values: &[f64],
    graph: &WeightedGraph,
    tol: f64,
) -> Vec<(f64, f64)> {
    let mut remaining: Vec<(f64, f64)> = graph
        .edges()
        .iter()
        .map(|&(i, j)| {
            let (a, b) = (values[i], values[j]);
            if a <= b {
                (a, b)
            } else {
                (b, a)
            }
        })
        .collect();
    let mut out = Vec::new();
    while let Some(mut cur) = remaining.pop() {
        loop {
            let before = remaining.len();
            remaining.retain(|&(lo, hi)| {
                if lo <= cur.1 + tol && cur.0 <= hi + tol {
                    cur.0 = cur.0.min(lo);
                    cur.1 = cur.1.max(hi);
                    false
                } else {
                    true
                }
            });
            if remaining.len() == before {
                break;
            }
        }
        out.push(cur);
    }
    out.sort_by(|a, b| a.partial_cmp(b).expect("finite interval endpoints"));
    out
}
