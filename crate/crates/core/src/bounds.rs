//! Closed-form upper bounds on total s-energy.

use crate::error::{Error, Result};

/// Upper bound (c n^2 / (rho s))^m on the total s-energy of any unit-variance
/// run whose graphs keep at most `m` connected components.
///
/// `c` is an absolute constant left as a parameter; the acceptance suite fits
/// it over a corpus of measured runs.
pub fn theorem2_bound(n: usize, m: usize, rho: f64, s: f64, c: f64) -> Result<f64> {
    validate_counts(n, m)?;
    validate_rho(rho)?;
    validate_s(s)?;
    validate_c(c)?;
    let base = c * (n * n) as f64 / (rho * s);
    Ok(base.powi(m as i32))
}

/// The recurrence behind [`theorem2_bound`]: with alpha = 1 - rho / (2 n^2),
/// U(n, 0) = 0 and U(n, k) = 2 / (1 - alpha^(s/2)) * (U(n, k-1) + k).
///
/// Evaluating it directly gives a sharper (but messier) cap than the closed
/// form; it is exposed so the two can be compared numerically.
pub fn u_recurrence_bound(n: usize, m: usize, rho: f64, s: f64) -> Result<f64> {
    validate_counts(n, m)?;
    validate_rho(rho)?;
    validate_s(s)?;
    let alpha = 1.0 - rho / (2.0 * (n * n) as f64);
    let gain = 2.0 / (1.0 - alpha.powf(s / 2.0));
    let mut u = 0.0;
    for k in 1..=m {
        u = gain * (u + k as f64);
    }
    Ok(u)
}

fn validate_counts(n: usize, m: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidParameter {
            name: "n",
            value: n as f64,
            constraint: "need at least one agent",
        });
    }
    if m == 0 || m > n {
        return Err(Error::InvalidParameter {
            name: "m",
            value: m as f64,
            constraint: "component count must satisfy 1 <= m <= n",
        });
    }
    Ok(())
}

pub(crate) fn validate_rho(rho: f64) -> Result<()> {
    if !(rho > 0.0 && rho <= 0.5) {
        return Err(Error::InvalidParameter {
            name: "rho",
            value: rho,
            constraint: "entry floor must lie in (0, 1/2]",
        });
    }
    Ok(())
}

pub(crate) fn validate_s(s: f64) -> Result<()> {
    if !(s > 0.0 && s <= 1.0) {
        return Err(Error::InvalidParameter {
            name: "s",
            value: s,
            constraint: "exponent must lie in (0, 1]",
        });
    }
    Ok(())
}

pub(crate) fn validate_c(c: f64) -> Result<()> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "c",
            value: c,
            constraint: "constant must be positive and finite",
        });
    }
    Ok(())
}
