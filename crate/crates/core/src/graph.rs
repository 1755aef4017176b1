//! Undirected interaction graphs with cached connected components.

use crate::error::{Error, Result};
use crate::unionfind::UnionFind;

/// An undirected graph over `n` vertices holding the vertex set a system
/// averages over. Edges are stored canonically (i < j, sorted, distinct);
/// connected components are computed once at construction and cached.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
    component: Vec<usize>,
    component_count: usize,
}

impl WeightedGraph {
    /// Graph from an edge list. Self-loops, out-of-range endpoints, and
    /// duplicate pairs are rejected.
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut canonical: Vec<(usize, usize)> = Vec::with_capacity(edges.len());
        for &(a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::InvalidEdge {
                    i: a,
                    j: b,
                    n,
                    reason: "endpoint out of range",
                });
            }
            if a == b {
                return Err(Error::InvalidEdge {
                    i: a,
                    j: b,
                    n,
                    reason: "self-loop",
                });
            }
            canonical.push((a.min(b), a.max(b)));
        }
        canonical.sort_unstable();
        if canonical.windows(2).any(|w| w[0] == w[1]) {
            let dup = canonical
                .windows(2)
                .find(|w| w[0] == w[1])
                .map(|w| w[0])
                .unwrap();
            return Err(Error::InvalidEdge {
                i: dup.0,
                j: dup.1,
                n,
                reason: "duplicate edge",
            });
        }

        let mut adjacency = vec![Vec::new(); n];
        for &(i, j) in &canonical {
            adjacency[i].push(j);
            adjacency[j].push(i);
        }
        let (component, component_count) = components_of(n, &canonical);
        Ok(Self {
            n,
            edges: canonical,
            adjacency,
            component,
            component_count,
        })
    }

    /// Edgeless graph on `n` vertices.
    #[must_use]
    pub fn empty(n: usize) -> Self {
        Self {
            n,
            edges: Vec::new(),
            adjacency: vec![Vec::new(); n],
            component: (0..n).collect(),
            component_count: n,
        }
    }

    /// Path 0 - 1 - ... - n-1.
    #[must_use]
    pub fn path(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Self::new(n, &edges).expect("path edges are always valid")
    }

    /// rows x cols grid in row-major vertex order (vertex = row * cols + col).
    #[must_use]
    pub fn grid(rows: usize, cols: usize) -> Self {
        let mut edges = Vec::new();
        for r in 0..rows {
            for c in 0..cols {
                let i = r * cols + c;
                if c + 1 < cols {
                    edges.push((i, i + 1));
                }
                if r + 1 < rows {
                    edges.push((i, i + cols));
                }
            }
        }
        Self::new(rows * cols, &edges).expect("grid edges are always valid")
    }

    #[must_use]
    pub fn n(&self) -> usize {
        self.n
    }

    #[must_use]
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    #[must_use]
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    #[must_use]
    pub fn degree(&self, i: usize) -> usize {
        self.adjacency[i].len()
    }

    #[must_use]
    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    #[must_use]
    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adjacency[i]
    }

    #[must_use]
    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        let key = (a.min(b), a.max(b));
        self.edges.binary_search(&key).is_ok()
    }

    /// Component id of vertex `i` (ids are dense, ordered by first member).
    #[must_use]
    pub fn component_of(&self, i: usize) -> usize {
        self.component[i]
    }

    /// Cached component id per vertex.
    #[must_use]
    pub fn components(&self) -> &[usize] {
        &self.component
    }

    #[must_use]
    pub fn component_count(&self) -> usize {
        self.component_count
    }

    #[must_use]
    pub fn is_connected(&self) -> bool {
        self.component_count <= 1
    }

    /// Vertex lists per component, in component-id order.
    #[must_use]
    pub fn component_members(&self) -> Vec<Vec<usize>> {
        let mut members = vec![Vec::new(); self.component_count];
        for (v, &c) in self.component.iter().enumerate() {
            members[c].push(v);
        }
        members
    }

    /// Fresh union-find pass over the edges, bypassing the cache (tests use
    /// this to confirm the cache is consistent).
    #[must_use]
    pub fn recompute_components(&self) -> (Vec<usize>, usize) {
        components_of(self.n, &self.edges)
    }
}

/// Dense component ids (ordered by first member) for an edge list.
fn components_of(n: usize, edges: &[(usize, usize)]) -> (Vec<usize>, usize) {
    let mut uf = UnionFind::new(n);
    for &(i, j) in edges {
        uf.union(i, j);
    }
    let mut ids = vec![usize::MAX; n];
    let mut next = 0;
    let mut out = vec![0; n];
    for (v, slot) in out.iter_mut().enumerate() {
        let root = uf.find(v);
        if ids[root] == usize::MAX {
            ids[root] = next;
            next += 1;
        }
        *slot = ids[root];
    }
    (out, next)
}
