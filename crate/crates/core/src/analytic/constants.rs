//! Closed-form limit constants of the weighted small-deviation series.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::gamma::gamma_fn;
use crate::error::{domain, parameter, Result};

/// Number of Cohen–Villegas–Zagier weights; error is below 2·5.83^{-40}.
const CVZ_TERMS: usize = 40;

/// Which limit a [`LimitConstant`] belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "limit", rename_all = "kebab-case")]
pub enum LimitKind {
    /// ε ↗ 1/√(1+a) with weights (log n)^a (log log n)^b / n and offset τ.
    CriticalEpsilon { a: f64, b: f64, tau: f64 },
    /// ε → ∞ with weights (log log n)^b / (n log n).
    LargeEpsilon { b: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitConstant {
    pub value: f64,
    pub kind: LimitKind,
}

/// Dirichlet-beta type sum `Σ_{k≥0} (−1)^k / (2k+1)^s` for `s > 1`.
///
/// Summed with the Cohen–Villegas–Zagier acceleration, valid because
/// `(2k+1)^{-s}` is a moment sequence of a positive measure on `[0, 1]`.
pub fn alt_odd_series(s: f64) -> Result<f64> {
    if !(s > 1.0) {
        return Err(parameter(format!("alt_odd_series requires s > 1, got {s}")));
    }
    let n = CVZ_TERMS;
    let mut d = (3.0 + 8f64.sqrt()).powi(n as i32);
    d = 0.5 * (d + 1.0 / d);
    let mut b = -1.0;
    let mut c = -d;
    let mut sum = 0.0;
    for k in 0..n {
        c = b - c;
        sum += c * ((2 * k + 1) as f64).powf(-s);
        let kf = k as f64;
        let nf = n as f64;
        b *= (kf + nf) * (kf - nf) / ((kf + 0.5) * (kf + 1.0));
    }
    Ok(sum / d)
}

/// `(4/π) (1/(2(1+a)^{3/2}))^{b+1} Γ(b+1) exp(2(1+a)^{3/2} τ)`.
pub fn critical_limit_constant(a: f64, b: f64, tau: f64) -> Result<LimitConstant> {
    if !(a > -1.0) || !a.is_finite() {
        return Err(domain(format!("weight exponent a must satisfy a > −1, got {a}")));
    }
    if !(b > -1.0) || !b.is_finite() {
        return Err(domain(format!("weight exponent b must satisfy b > −1, got {b}")));
    }
    if !tau.is_finite() {
        return Err(domain(format!("offset τ must be finite, got {tau}")));
    }
    let k = (1.0 + a).powf(1.5);
    let value = 4.0 / PI * (0.5 / k).powf(b + 1.0) * gamma_fn(b + 1.0)? * (2.0 * k * tau).exp();
    Ok(LimitConstant {
        value,
        kind: LimitKind::CriticalEpsilon { a, b, tau },
    })
}

/// `(4/π) Γ(b+1) Σ_{k≥0} (−1)^k/(2k+1)^{2b+3}`.
pub fn large_eps_limit_constant(b: f64) -> Result<LimitConstant> {
    if !(b > -1.0) || !b.is_finite() {
        return Err(domain(format!("weight exponent b must satisfy b > −1, got {b}")));
    }
    let value = 4.0 / PI * gamma_fn(b + 1.0)? * alt_odd_series(2.0 * b + 3.0)?;
    Ok(LimitConstant {
        value,
        kind: LimitKind::LargeEpsilon { b },
    })
}
