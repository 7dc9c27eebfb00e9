//! Distribution of sup_{0≤s≤1} |W(s)| for a standard Wiener process.
//!
//! Two alternating expansions are available:
//!
//! * theta form: `(4/π) Σ_{k≥0} (−1)^k/(2k+1) · exp(−π²(2k+1)²/(8x²))`,
//!   which needs very few terms for small `x`;
//! * Gaussian reflection form:
//!   `Σ_{k∈ℤ} (−1)^k [Φ((2k+1)x) − Φ((2k−1)x)] = 1 − 4 Σ_{j≥0} (−1)^j Φ̄((2j+1)x)`,
//!   which needs few terms for large `x`.
//!
//! Both have monotonically decreasing terms, so the first omitted term bounds
//! the truncation error.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{domain, parameter, Error, Result};

/// Default absolute tolerance for [`small_ball_sup`].
pub const DEFAULT_TOL: f64 = 1e-12;

/// Largest tolerance accepted by the small-ball evaluators.
pub const MAX_TOL: f64 = 1e-6;

/// Below this `x` the theta form is used, above it the reflection form.
pub const SWITCH_X: f64 = 0.9;

const MAX_TERMS: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Representation {
    ThetaSeries,
    ReflectionSeries,
}

impl std::fmt::Display for Representation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Representation::ThetaSeries => "theta-series",
            Representation::ReflectionSeries => "reflection-series",
        })
    }
}

/// Value of `P(sup_{0≤s≤1}|W(s)| ≤ x)` together with how it was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmallBallResult {
    pub value: f64,
    pub terms_used: usize,
    pub representation: Representation,
    /// Size of the first omitted term.
    pub error_bound: f64,
}

/// Upper tail of the standard normal distribution, `Φ̄(z) = P(Z > z)`.
pub fn normal_sf(z: f64) -> f64 {
    0.5 * libm::erfc(z * FRAC_1_SQRT_2)
}

fn check_x(x: f64) -> Result<()> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(domain(format!("small-ball level must satisfy x > 0, got {x}")));
    }
    Ok(())
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol > 0.0 && tol <= MAX_TOL) {
        return Err(parameter(format!(
            "tolerance must satisfy 0 < tol ≤ {MAX_TOL:e}, got {tol:e}"
        )));
    }
    Ok(())
}

/// `P(sup_{0≤s≤1}|W(s)| ≤ x)` to absolute accuracy `tol`.
pub fn small_ball_sup(x: f64, tol: f64) -> Result<SmallBallResult> {
    check_x(x)?;
    check_tol(tol)?;
    if x <= SWITCH_X {
        theta_series(x, tol)
    } else {
        reflection_series(x, tol)
    }
}

/// Theta-form evaluation, usable for any `x > 0`.
pub fn theta_series(x: f64, tol: f64) -> Result<SmallBallResult> {
    check_x(x)?;
    check_tol(tol)?;
    let scale = PI * PI / (8.0 * x * x);
    let term = |k: usize| {
        let odd = (2 * k + 1) as f64;
        4.0 / PI * (-scale * odd * odd).exp() / odd
    };
    let mut sum = 0.0;
    for k in 0..MAX_TERMS {
        let t = term(k);
        if k % 2 == 0 {
            sum += t;
        } else {
            sum -= t;
        }
        let next = term(k + 1);
        if next <= tol {
            return Ok(SmallBallResult {
                value: sum.clamp(0.0, 1.0),
                terms_used: k + 1,
                representation: Representation::ThetaSeries,
                error_bound: next,
            });
        }
    }
    Err(Error::NoConvergence(format!("theta series at x = {x}")))
}

/// Reflection-form evaluation, usable for any `x > 0`.
pub fn reflection_series(x: f64, tol: f64) -> Result<SmallBallResult> {
    check_x(x)?;
    check_tol(tol)?;
    let term = |j: usize| 4.0 * normal_sf((2 * j + 1) as f64 * x);
    let mut tail = 0.0;
    for j in 0..MAX_TERMS {
        let t = term(j);
        if j % 2 == 0 {
            tail += t;
        } else {
            tail -= t;
        }
        let next = term(j + 1);
        if next <= tol {
            return Ok(SmallBallResult {
                value: (1.0 - tail).clamp(0.0, 1.0),
                terms_used: j + 1,
                representation: Representation::ReflectionSeries,
                error_bound: next,
            });
        }
    }
    Err(Error::NoConvergence(format!("reflection series at x = {x}")))
}

/// Leading small-`x` behaviour `(4/π) exp(−π²/(8x²))`.
pub fn small_ball_asymptotic(x: f64) -> Result<f64> {
    check_x(x)?;
    Ok(4.0 / PI * (-PI * PI / (8.0 * x * x)).exp())
}

/// Two-sided bound `(2/π)e^{−π²/(8x²)} ≤ P(sup|W| ≤ x) ≤ min(1, (4/π)e^{−π²/(8x²)})`.
pub fn small_ball_bounds(x: f64) -> Result<(f64, f64)> {
    check_x(x)?;
    let leading = (-PI * PI / (8.0 * x * x)).exp();
    Ok((2.0 / PI * leading, (4.0 / PI * leading).min(1.0)))
}
