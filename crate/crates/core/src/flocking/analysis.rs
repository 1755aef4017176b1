//! Post-run diagnostics: stabilization detection, limit velocities,
//! exponential decay fits, flight-line fits, and line-of-sight gaps.

use crate::error::{Error, Result};

use super::{
    flock_q_mean_velocity, flock_velocity_diameter, norm3, FlockHistory, FlockRun,
};

/// Least-squares fit of ln(value) = log_intercept + rate * t.
#[derive(Debug, Clone)]
pub struct ExponentialFit {
    pub rate: f64,
    pub log_intercept: f64,
    /// Number of points that entered the fit.
    pub points: usize,
}

/// Fits an exponential to (t, value) pairs, ignoring values at or below the
/// floor; returns None when fewer than 4 usable points remain (the series
/// already collapsed to noise, which counts as converged).
pub fn fit_exponential_decay(series: &[(usize, f64)], floor: f64) -> Option<ExponentialFit> {
    let usable: Vec<(f64, f64)> = series
        .iter()
        .filter(|&&(_, v)| v > floor)
        .map(|&(t, v)| (t as f64, v.ln()))
        .collect();
    if usable.len() < 4 {
        return None;
    }
    let n = usable.len() as f64;
    let st: f64 = usable.iter().map(|p| p.0).sum();
    let sy: f64 = usable.iter().map(|p| p.1).sum();
    let stt: f64 = usable.iter().map(|p| p.0 * p.0).sum();
    let sty: f64 = usable.iter().map(|p| p.0 * p.1).sum();
    let denom = n * stt - st * st;
    if denom.abs() < f64::EPSILON {
        return None;
    }
    let rate = (n * sty - st * sy) / denom;
    Some(ExponentialFit {
        rate,
        log_intercept: (sy - rate * st) / n,
        points: usable.len(),
    })
}

/// One terminal flock: its members, limit velocity, and decay fit.
#[derive(Debug, Clone)]
pub struct FlockLimit {
    pub members: Vec<usize>,
    /// q-weighted mean member velocity, invariant once switching stops.
    pub velocity: [f64; 3],
    /// Exponential fit of the post-stabilization velocity diameter; None when
    /// the diameter collapsed too fast to fit (already converged).
    pub decay: Option<ExponentialFit>,
}

/// Outcome of stabilization detection on a completed run.
#[derive(Debug, Clone)]
pub struct StabilizationReport {
    /// Whether the network stayed unchanged for the requested quiet tail.
    pub stabilized: bool,
    /// Last switch time (0 for a run that never switched).
    pub t_stable: usize,
    pub flocks: Vec<FlockLimit>,
    pub total_steps: usize,
}

/// Numerical floor below which velocity diameters count as collapsed.
pub const DIAMETER_FLOOR: f64 = 1e-14;

/// Reads off the last switch time, the terminal flocks with their limit
/// velocities, and (when history is recorded) an exponential fit of each
/// flock's velocity-diameter decay after the last switch.
pub fn detect_stabilization(run: &FlockRun, quiet_tail: usize) -> StabilizationReport {
    let t_stable = run.switches.last_switch_time();
    let total_steps = run.state.t;
    let stabilized = total_steps >= t_stable + quiet_tail;
    let q = run.config.q();
    let flocks = run
        .state
        .flocks()
        .into_iter()
        .map(|members| {
            let velocity = flock_q_mean_velocity(&members, &run.state.v, &q);
            let decay = run.history.as_ref().and_then(|h| {
                let series: Vec<(usize, f64)> = (t_stable..h.len())
                    .map(|t| (t - t_stable, flock_velocity_diameter(&members, &h.v[t])))
                    .collect();
                fit_exponential_decay(&series, DIAMETER_FLOOR)
            });
            FlockLimit {
                members,
                velocity,
                decay,
            }
        })
        .collect();
    StabilizationReport {
        stabilized,
        t_stable,
        flocks,
        total_steps,
    }
}

/// Shared-slope, per-bird-intercept least-squares fit of member positions to
/// x_i(t) = beta * t + gamma_i over [t_from, t_to].
#[derive(Debug, Clone)]
pub struct FlightLineFit {
    pub members: Vec<usize>,
    pub beta: [f64; 3],
    /// Per member (in `members` order), the fitted intercept.
    pub gamma: Vec<[f64; 3]>,
    /// Per step of the fitted window, max over members and coordinates of
    /// the absolute residual.
    pub residual_inf: Vec<f64>,
}

/// Fits the flight line of one flock over a window of at least 4 steps.
pub fn fit_flight_line(
    history: &FlockHistory,
    members: &[usize],
    t_from: usize,
    t_to: usize,
) -> Result<FlightLineFit> {
    if members.is_empty() {
        return Err(Error::InsufficientData("flight-line fit needs members".into()));
    }
    if t_to >= history.len() || t_from > t_to {
        return Err(Error::InsufficientData(format!(
            "window [{t_from}, {t_to}] outside recorded history of {} steps",
            history.len()
        )));
    }
    let steps = t_to - t_from + 1;
    if steps < 4 {
        return Err(Error::InsufficientData(format!(
            "flight-line fit needs at least 4 steps, got {steps}"
        )));
    }
    let t_mean = (t_from + t_to) as f64 / 2.0;
    let stt: f64 = (t_from..=t_to)
        .map(|t| {
            let d = t as f64 - t_mean;
            d * d
        })
        .sum();
    let k = members.len() as f64;

    let mut beta = [0.0; 3];
    let mut x_means = vec![[0.0; 3]; members.len()];
    for (mi, &i) in members.iter().enumerate() {
        for (c, mean) in x_means[mi].iter_mut().enumerate() {
            *mean = (t_from..=t_to).map(|t| history.x[t][i][c]).sum::<f64>() / steps as f64;
        }
    }
    for c in 0..3 {
        let mut num = 0.0;
        for (mi, &i) in members.iter().enumerate() {
            for t in t_from..=t_to {
                num += (t as f64 - t_mean) * (history.x[t][i][c] - x_means[mi][c]);
            }
        }
        beta[c] = num / (k * stt);
    }
    let gamma: Vec<[f64; 3]> = x_means
        .iter()
        .map(|xm| {
            [
                xm[0] - beta[0] * t_mean,
                xm[1] - beta[1] * t_mean,
                xm[2] - beta[2] * t_mean,
            ]
        })
        .collect();
    let residual_inf: Vec<f64> = (t_from..=t_to)
        .map(|t| {
            let mut worst = 0.0f64;
            for (mi, &i) in members.iter().enumerate() {
                for c in 0..3 {
                    let fitted = beta[c] * t as f64 + gamma[mi][c];
                    worst = worst.max((history.x[t][i][c] - fitted).abs());
                }
            }
            worst
        })
        .collect();
    Ok(FlightLineFit {
        members: members.to_vec(),
        beta,
        gamma,
        residual_inf,
    })
}

/// The average velocity seen from a bird's start: (x_i(t) - x_i(0)) / t.
pub fn line_of_sight_vector(history: &FlockHistory, i: usize, t: usize) -> Result<[f64; 3]> {
    if t <= 1 {
        return Err(Error::InvalidParameter {
            name: "t",
            value: t as f64,
            constraint: "line-of-sight needs t > 1",
        });
    }
    if t >= history.len() {
        return Err(Error::InsufficientData(format!(
            "time {t} outside recorded history of {} steps",
            history.len()
        )));
    }
    let x_t = &history.x[t][i];
    let x_0 = &history.x[0][i];
    Ok([
        (x_t[0] - x_0[0]) / t as f64,
        (x_t[1] - x_0[1]) / t as f64,
        (x_t[2] - x_0[2]) / t as f64,
    ])
}

/// Distance between a bird's current velocity and its line-of-sight vector.
pub fn line_of_sight_gap(history: &FlockHistory, i: usize, t: usize) -> Result<f64> {
    let u = line_of_sight_vector(history, i, t)?;
    let v = &history.v[t][i];
    Ok(norm3(&[v[0] - u[0], v[1] - u[1], v[2] - u[2]]))
}
