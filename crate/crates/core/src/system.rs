//! Reversible averaging systems and the weighted geometry they preserve.
//!
//! A system is a row-stochastic matrix P built from an interaction graph and
//! per-vertex weights a_i: P_ij = a_i on edges, P_ii = 1 - a_i deg(i). With
//! q_i = 1/a_i this satisfies exact detailed balance q_i P_ij = q_j P_ji, so
//! one averaging step never increases the q-norm and conserves the q-mean.

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;

/// Row-stochastic averaging matrix in sparse row form, together with its
/// stationary weights q and the floor rho on its positive entries.
#[derive(Clone, Debug)]
pub struct ReversibleSystem {
    q: Vec<f64>,
    rho: f64,
    rows: Vec<Vec<(usize, f64)>>,
    diag: Vec<f64>,
}

/// Build the averaging matrix for `graph` with weights `a`.
///
/// Requires 0 < a_i <= 1/(deg(i) + 1) so the diagonal stays at least a_i and
/// every positive entry is at least rho = min a_i.
pub fn build_system(graph: &WeightedGraph, a: &[f64]) -> Result<ReversibleSystem> {
    let n = graph.n();
    if a.len() != n {
        return Err(Error::DimensionMismatch {
            name: "a",
            expected: n,
            got: a.len(),
        });
    }
    for (i, &ai) in a.iter().enumerate() {
        let cap = 1.0 / (graph.degree(i) as f64 + 1.0);
        if !(ai > 0.0 && ai <= cap + 1e-15) || !ai.is_finite() {
            return Err(Error::InvalidParameter {
                name: "a",
                value: ai,
                constraint: "each weight must satisfy 0 < a_i <= 1/(deg(i) + 1)",
            });
        }
    }

    let mut rows = Vec::with_capacity(n);
    let mut diag = Vec::with_capacity(n);
    for (i, &a_i) in a.iter().enumerate() {
        let row: Vec<(usize, f64)> = graph.neighbors(i).iter().map(|&j| (j, a_i)).collect();
        diag.push(1.0 - a_i * row.len() as f64);
        rows.push(row);
    }
    let rho = a.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(ReversibleSystem {
        q: a.iter().map(|&ai| 1.0 / ai).collect(),
        rho,
        rows,
        diag,
    })
}

impl ReversibleSystem {
    #[must_use]
    pub fn n(&self) -> usize {
        self.q.len()
    }

    /// Stationary weight vector q (q_i = 1/a_i).
    #[must_use]
    pub fn q(&self) -> &[f64] {
        &self.q
    }

    /// Floor on the positive matrix entries.
    #[must_use]
    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// Off-diagonal entries of row `i` plus its diagonal value.
    #[must_use]
    pub fn row(&self, i: usize) -> (&[(usize, f64)], f64) {
        (&self.rows[i], self.diag[i])
    }

    /// y = P x.
    pub fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        for i in 0..self.rows.len() {
            let mut acc = self.diag[i] * x[i];
            for &(j, w) in &self.rows[i] {
                acc += w * x[j];
            }
            out[i] = acc;
        }
    }

    #[must_use]
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; x.len()];
        self.apply_into(x, &mut out);
        out
    }

    /// Dense copy of the matrix; intended for small-n oracles in tests.
    #[must_use]
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.n();
        let mut dense = vec![vec![0.0; n]; n];
        for (i, row) in dense.iter_mut().enumerate() {
            row[i] = self.diag[i];
            for &(j, w) in &self.rows[i] {
                row[j] = w;
            }
        }
        dense
    }

    /// Smallest positive entry of the matrix (diagonal included).
    #[must_use]
    pub fn min_positive_entry(&self) -> f64 {
        let mut min = f64::INFINITY;
        for i in 0..self.n() {
            if self.diag[i] > 0.0 {
                min = min.min(self.diag[i]);
            }
            for &(_, w) in &self.rows[i] {
                if w > 0.0 {
                    min = min.min(w);
                }
            }
        }
        min
    }

    /// max_i |sum_j P_ij - 1|.
    #[must_use]
    pub fn row_sum_error(&self) -> f64 {
        (0..self.n())
            .map(|i| {
                let s: f64 = self.diag[i] + self.rows[i].iter().map(|&(_, w)| w).sum::<f64>();
                (s - 1.0).abs()
            })
            .fold(0.0, f64::max)
    }

    /// max over edges of |q_i P_ij - q_j P_ji|.
    #[must_use]
    pub fn detailed_balance_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.n() {
            for &(j, w) in &self.rows[i] {
                let wji = self.rows[j]
                    .iter()
                    .find(|&&(k, _)| k == i)
                    .map_or(0.0, |&(_, v)| v);
                worst = worst.max((self.q[i] * w - self.q[j] * wji).abs());
            }
        }
        worst
    }
}

/// One embedding of the vertex set on the line: the per-vertex values a
/// system's weight vector q measures.
#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddedState {
    pub values: Vec<f64>,
}

impl EmbeddedState {
    #[must_use]
    pub fn new(values: Vec<f64>) -> Self {
        Self { values }
    }

    #[must_use]
    pub fn len(&self) -> usize {
        self.values.len()
    }

    #[must_use]
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// max - min of the values.
    #[must_use]
    pub fn diameter(&self) -> f64 {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for &v in &self.values {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if self.values.is_empty() {
            0.0
        } else {
            hi - lo
        }
    }
}

/// Advance the state one averaging step: x(t+1) = P x(t).
pub fn step(state: &EmbeddedState, sys: &ReversibleSystem) -> Result<EmbeddedState> {
    if state.len() != sys.n() {
        return Err(Error::DimensionMismatch {
            name: "state",
            expected: sys.n(),
            got: state.len(),
        });
    }
    Ok(EmbeddedState::new(sys.apply(&state.values)))
}

/// <x, y>_q = sum_i q_i x_i y_i.
#[must_use]
pub fn q_inner(q: &[f64], x: &[f64], y: &[f64]) -> f64 {
    q.iter()
        .zip(x.iter().zip(y))
        .map(|(&qi, (&xi, &yi))| qi * xi * yi)
        .sum()
}

/// ||x||_q^2.
#[must_use]
pub fn q_norm_sq(q: &[f64], x: &[f64]) -> f64 {
    q.iter().zip(x).map(|(&qi, &xi)| qi * xi * xi).sum()
}

/// q-weighted mean of x: <x, 1>_q / ||q||_1.
#[must_use]
pub fn q_mean(q: &[f64], x: &[f64]) -> f64 {
    let total: f64 = q.iter().sum();
    q.iter().zip(x).map(|(&qi, &xi)| qi * xi).sum::<f64>() / total
}

/// ||x - mean 1||_q^2: the q-variance an averaging run drives to zero.
#[must_use]
pub fn variance(q: &[f64], x: &[f64]) -> f64 {
    let mean = q_mean(q, x);
    q.iter()
        .zip(x)
        .map(|(&qi, &xi)| qi * (xi - mean) * (xi - mean))
        .sum()
}
