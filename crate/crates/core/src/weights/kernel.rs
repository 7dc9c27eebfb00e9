//! Kernel sums `Σ_n (log n)^a (log log n)^b n^{-1} exp(−log log n / ε²)` and
//! their integral counterparts.

use std::f64::consts::{E, PI};

use serde::{Deserialize, Serialize};

use super::{guarded_loglog, weight, EpsilonSchedule, WeightParams};
use crate::analytic::{critical_limit_constant, upper_incomplete_gamma};
use crate::error::{domain, parameter, Error, Result};
use crate::CancelToken;

/// Terms between cancellation checks.
pub(crate) const CANCEL_STRIDE: u64 = 100_000;

/// First integer past `e^e`, where `log log n` leaves its guard.
pub(crate) const FIRST_UNGUARDED: u64 = 16;

/// Logarithms of `n` needed by the summands, with the guards applied.
#[derive(Debug, Clone, Copy)]
pub(crate) struct LogParts {
    pub ln_n: f64,
    /// `ln(log n)`, the log of the (guarded) first logarithm.
    pub ln_log: f64,
    /// guarded `log log n`
    pub loglog: f64,
    /// `ln(log log n)`
    pub ln_loglog: f64,
}

impl LogParts {
    #[inline]
    pub fn of(n: u64) -> Self {
        let ln_n = (n as f64).ln();
        let ln_log = ln_n.max(1.0).ln();
        let loglog = ln_log.max(1.0);
        Self {
            ln_n,
            ln_log,
            loglog,
            ln_loglog: loglog.ln(),
        }
    }

    /// `(log n)^a (log log n)^b / n · exp(−extra)`.
    #[inline]
    pub fn weighted(&self, a: f64, b: f64, extra: f64) -> f64 {
        let mut expo = a * self.ln_log - self.ln_n - extra;
        if b != 0.0 {
            expo += b * self.ln_loglog;
        }
        expo.exp()
    }
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Partial sum of a weighted series with its error accounting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSumResult {
    pub partial_sum: f64,
    pub n_max: u64,
    /// Bound on the omitted terms `n > n_max`; infinite when no bound applies.
    pub tail_bound: f64,
    /// Interval guaranteed to contain the matching integral, when available.
    pub bracket: Option<(f64, f64)>,
    /// Partial sum after the limit normalization, when one applies.
    pub scaled_value: Option<f64>,
}

/// Bound on `∫_N^∞ (log x)^{−1−θ} (log log x)^b dx/x` for `N ≥ 16`.
///
/// With `u = ln x` the integrand is `u^{−1−θ} (ln u)^b` on `u ≥ U = ln N`.
/// For `b ≤ 0`, `(ln u)^b ≤ 1` because `ln u ≥ 1`, so the bound is `U^{−θ}/θ`.
/// For `b > 0`, `d(b ln ln u)/d(ln u) = b/ln u ≤ δ := b/ln U`, hence
/// `(ln u)^b ≤ (ln U)^b (u/U)^δ` and the bound is `(ln U)^b U^{−θ}/(θ − δ)`,
/// finite only when `δ < θ`.
pub fn tail_majorant(theta: f64, b: f64, n: u64) -> f64 {
    if !(theta > 0.0) || n < FIRST_UNGUARDED {
        return f64::INFINITY;
    }
    let u = (n as f64).ln();
    if b <= 0.0 {
        return u.powf(-theta) / theta;
    }
    let ln_u = u.ln();
    let delta = b / ln_u;
    if delta >= theta {
        return f64::INFINITY;
    }
    ln_u.powf(b) * u.powf(-theta) / (theta - delta)
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(domain(format!("ε must be a positive real, got {eps}")));
    }
    Ok(())
}

/// `θ = 1/ε² − 1 − a`, the decay rate in the `y = log log x` variable.
fn theta_of(params: WeightParams, eps: f64) -> f64 {
    1.0 / (eps * eps) - 1.0 - params.a()
}

/// Direct summation of the kernel series up to `n_max`.
///
/// Restricted to `θ ≥ 1` and `b ≤ e`: there the summand is decreasing beyond
/// `e^e`, the mass is reached within reasonable `n`, and the bracket
/// `[S − head − f(16), S − head + (16 − e^e) f(e^e) + tail]` provably contains
/// `∫_{e^e}^∞ f`, where `head` collects the guarded terms `n ≤ 15`.
pub fn kernel_sum_direct(
    params: WeightParams,
    eps: f64,
    n_max: u64,
    cancel: Option<&CancelToken>,
) -> Result<KernelSumResult> {
    check_eps(eps)?;
    let theta = theta_of(params, eps);
    // tolerate rounding in θ = 1/ε² − 1 − a at the gate itself
    if theta < 1.0 - 1e-9 {
        return Err(Error::Mode(format!(
            "direct summation needs 1/ε² − 1 − a ≥ 1 (got {theta:.6}); use the integral mode"
        )));
    }
    if params.b() > E {
        return Err(Error::Mode(format!(
            "direct summation needs b ≤ e for a monotone summand (got b = {})",
            params.b()
        )));
    }
    if n_max < 100 {
        return Err(parameter(format!("n_max must be at least 100, got {n_max}")));
    }
    let inv_eps2 = 1.0 / (eps * eps);
    let (a, b) = (params.a(), params.b());

    let mut head = CompensatedSum::default();
    for n in 1..FIRST_UNGUARDED {
        head.add(weight(n, params) * (-guarded_loglog(n as f64) * inv_eps2).exp());
    }
    let mut body = CompensatedSum::default();
    for n in FIRST_UNGUARDED..=n_max {
        if n % CANCEL_STRIDE == 0 && cancel.is_some_and(CancelToken::is_cancelled) {
            return Err(Error::Cancelled);
        }
        let lp = LogParts::of(n);
        body.add(lp.weighted(a, b, lp.loglog * inv_eps2));
    }
    let head = head.value();
    let body = body.value();
    let partial_sum = head + body;

    let tail_bound = tail_majorant(theta, b, n_max);
    let f16 = LogParts::of(FIRST_UNGUARDED).weighted(a, b, LogParts::of(FIRST_UNGUARDED).loglog * inv_eps2);
    // at x = e^e: log x = e, log log x = 1
    let f_ee = (a - E - inv_eps2).exp();
    let lo = body - f16;
    let hi = body + (FIRST_UNGUARDED as f64 - E.exp()) * f_ee + tail_bound;
    let mid = 0.5 * (lo + hi);
    let scaled_value = (params.critical_eps() - eps).powf(b + 1.0) * 4.0 / PI * mid;

    Ok(KernelSumResult {
        partial_sum,
        n_max,
        tail_bound,
        bracket: Some((lo, hi)),
        scaled_value: Some(scaled_value),
    })
}

/// `∫_{e^e}^∞ (log x)^a (log log x)^b x^{−1} exp(−log log x/ε²) dx = θ^{−(b+1)} Γ(b+1, θ)`.
pub fn kernel_sum_integral(params: WeightParams, eps: f64) -> Result<f64> {
    check_eps(eps)?;
    let theta = theta_of(params, eps);
    if !(theta > 0.0) {
        return Err(Error::Divergence(format!(
            "kernel series diverges for ε ≥ 1/√(1+a) = {:.6} (ε = {eps})",
            params.critical_eps()
        )));
    }
    let s = params.b() + 1.0;
    Ok(theta.powf(-s) * upper_incomplete_gamma(s, theta)?)
}

/// One row of [`scaled_limit_check`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaledRow {
    pub eps: f64,
    /// `(1/√(1+a) − ε)^{b+1} (4/π) I(ε) exp(2(1+a)^{3/2} τ)`.
    pub scaled_value: f64,
    pub reference: f64,
    /// `scaled_value / reference − 1`.
    pub deviation: f64,
    /// Same normalization with the finite-ε offset factor `exp(2τ/ε³)`.
    pub finite_eps_value: f64,
}

/// Normalized kernel integrals against the critical-ε limit constant.
pub fn scaled_limit_check(
    params: WeightParams,
    schedule: EpsilonSchedule,
    eps_grid: &[f64],
) -> Result<Vec<ScaledRow>> {
    let tau = schedule.tau_limit();
    let reference = critical_limit_constant(params.a(), params.b(), tau)?.value;
    let k = (1.0 + params.a()).powf(1.5);
    eps_grid
        .iter()
        .map(|&eps| {
            let integral = kernel_sum_integral(params, eps)?;
            let base = (params.critical_eps() - eps).powf(params.b() + 1.0) * 4.0 / PI * integral;
            let scaled_value = base * (2.0 * k * tau).exp();
            Ok(ScaledRow {
                eps,
                scaled_value,
                reference,
                deviation: scaled_value / reference - 1.0,
                finite_eps_value: base * (2.0 * tau / eps.powi(3)).exp(),
            })
        })
        .collect()
}

/// `q^{−(b+1)} Γ(b+1, q/ε²)`, which tends to `Γ(b+1) q^{−(b+1)}` as ε → ∞.
pub fn large_eps_kernel(q: f64, b: f64, eps: f64) -> Result<f64> {
    if !(q > 0.0) || !q.is_finite() {
        return Err(domain(format!("q must be a positive real, got {q}")));
    }
    if !(b > -1.0) {
        return Err(domain(format!("weight exponent b must satisfy b > −1, got {b}")));
    }
    check_eps(eps)?;
    Ok(q.powf(-(b + 1.0)) * upper_incomplete_gamma(b + 1.0, q / (eps * eps))?)
}
