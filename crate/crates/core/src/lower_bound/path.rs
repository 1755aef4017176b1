//! Static path construction whose diameter admits a closed spectral form.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::system::{build_system, EmbeddedState, ReversibleSystem};

/// Largest admissible uniform weight for the path construction (exclusive).
pub const PATH_WEIGHT_LIMIT: f64 = 0.25;

/// Path of `n` agents averaging with uniform weight `rho`, started from
/// x = (1, 0, ..., 0); the diameter after each step has an exact cosine-mode
/// expansion that the simulator is checked against.
#[derive(Debug, Clone)]
pub struct PathSpectralModel {
    n: usize,
    rho: f64,
    /// Per odd mode k: (eigenvalue, diameter weight 2 cos^2(k pi/2n) / |v_k|^2).
    modes: Vec<(f64, f64)>,
}

impl PathSpectralModel {
    /// Requires n >= 2 and 0 < rho < 1/4 (keeps the update matrix positive
    /// semidefinite, so the diameter expansion has all-positive terms).
    pub fn new(n: usize, rho: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter {
                name: "n",
                value: n as f64,
                constraint: "path construction needs at least two agents",
            });
        }
        if !(rho > 0.0 && rho < PATH_WEIGHT_LIMIT) {
            return Err(Error::InvalidParameter {
                name: "rho",
                value: rho,
                constraint: "uniform weight must lie in (0, 1/4)",
            });
        }
        let nf = n as f64;
        let modes = (1..n)
            .step_by(2)
            .map(|k| {
                let kf = k as f64;
                let lambda = 1.0 - 2.0 * rho * (1.0 - (kf * PI / nf).cos());
                let c = (kf * PI / (2.0 * nf)).cos();
                // |v_k|^2 = n/2 for k >= 1.
                (lambda, 2.0 * c * c / (nf / 2.0))
            })
            .collect();
        Ok(Self { n, rho, modes })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// k-th eigenvalue of the update matrix, 1 - 2 rho (1 - cos(k pi / n)).
    pub fn eigenvalue(&self, k: usize) -> f64 {
        assert!(k < self.n, "mode index {k} out of range for n = {}", self.n);
        1.0 - 2.0 * self.rho * (1.0 - (k as f64 * PI / self.n as f64).cos())
    }

    /// k-th eigenvector, v_k(i) = cos((i - 1/2) k pi / n) for i = 1..n.
    pub fn eigenvector(&self, k: usize) -> Vec<f64> {
        assert!(k < self.n, "mode index {k} out of range for n = {}", self.n);
        let nf = self.n as f64;
        (1..=self.n)
            .map(|i| ((i as f64 - 0.5) * k as f64 * PI / nf).cos())
            .collect()
    }

    /// Diameter of the state after t - 1 steps (t >= 1), by the mode sum.
    pub fn diameter(&self, t: usize) -> f64 {
        assert!(t >= 1, "diameters are indexed from t = 1");
        self.modes
            .iter()
            .map(|&(lambda, w)| w * lambda.powi(t as i32 - 1))
            .sum()
    }

    /// Diameters for t = 1..=t_max, evaluated incrementally (one multiply per
    /// mode per step instead of a fresh power).
    pub fn diameters(&self, t_max: usize) -> Vec<f64> {
        let mut powers: Vec<f64> = vec![1.0; self.modes.len()];
        let mut out = Vec::with_capacity(t_max);
        for _ in 1..=t_max {
            let mut d = 0.0;
            for (p, &(lambda, w)) in powers.iter_mut().zip(&self.modes) {
                d += w * *p;
                *p *= lambda;
            }
            out.push(d);
        }
        out
    }

    /// Guaranteed floor (2/n) lambda_1^(t-1) <= diameter(t).
    pub fn diameter_floor(&self, t: usize) -> f64 {
        assert!(t >= 1, "diameters are indexed from t = 1");
        let lambda_1 = self.eigenvalue(1);
        2.0 / self.n as f64 * lambda_1.powi(t as i32 - 1)
    }

    /// Partial s-energy sum over t = 1..=horizon of diameter(t)^s.
    ///
    /// Pick `horizon` with [`suggested_horizon`](Self::suggested_horizon) so
    /// the discarded tail is negligible.
    pub fn s_energy(&self, s: f64, horizon: usize) -> Result<f64> {
        crate::bounds::validate_s(s)?;
        let mut powers: Vec<f64> = vec![1.0; self.modes.len()];
        let mut total = 0.0;
        for _ in 1..=horizon {
            let mut d = 0.0;
            for (p, &(lambda, w)) in powers.iter_mut().zip(&self.modes) {
                d += w * *p;
                *p *= lambda;
            }
            total += if s == 1.0 { d } else { d.powf(s) };
        }
        Ok(total)
    }

    /// Closed-form floor (2/n)^s / (1 - lambda_1^s) on the full s-energy.
    pub fn s_energy_floor(&self, s: f64) -> Result<f64> {
        crate::bounds::validate_s(s)?;
        let lambda_1 = self.eigenvalue(1);
        Ok((2.0 / self.n as f64).powf(s) / (1.0 - lambda_1.powf(s)))
    }

    /// Smallest t guaranteeing diameter(t) < tol (via diameter(t) <= lambda_1^(t-1)).
    pub fn suggested_horizon(&self, tol: f64) -> usize {
        assert!(tol > 0.0 && tol < 1.0, "tolerance must lie in (0, 1)");
        let lambda_1 = self.eigenvalue(1);
        1 + (tol.ln() / lambda_1.ln()).ceil() as usize
    }

    /// The path graph the model describes.
    pub fn graph(&self) -> WeightedGraph {
        WeightedGraph::path(self.n)
    }

    /// The averaging system: uniform weight rho on the path.
    pub fn system(&self) -> ReversibleSystem {
        build_system(&self.graph(), &vec![self.rho; self.n])
            .expect("uniform rho < 1/4 is valid for path degrees <= 2")
    }

    /// The state the diameter expansion assumes: x = (1, 0, ..., 0).
    pub fn initial_state(&self) -> EmbeddedState {
        let mut values = vec![0.0; self.n];
        values[0] = 1.0;
        EmbeddedState::new(values)
    }
}
