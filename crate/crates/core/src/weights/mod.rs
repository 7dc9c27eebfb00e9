//! Logarithmic weights, kernel sums and the integral tests for boundary
//! functions ψ.
//!
//! Every logarithm here is guarded: `log x = ln(x ∨ e)` and
//! `log log x = log(log x)`, so both are at least 1 for every `n ≥ 1`.

mod kernel;

use std::f64::consts::{E, PI};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

pub use integral_test::{
    classify_chung_family, classify_psi_family, increment_diagnostic, j_ab_checkpoints,
    j_ab_partial, j_chung_checkpoints, j_chung_partial, IncrementDiagnostic, PsiSpec, Verdict,
};
pub use kernel::{
    kernel_sum_direct, kernel_sum_integral, large_eps_kernel, scaled_limit_check, tail_majorant,
    KernelSumResult, ScaledRow,
};

/// `ln(x ∨ e)`.
#[inline]
pub fn guarded_log(x: f64) -> f64 {
    x.max(E).ln()
}

/// `log(log x)` with both logarithms guarded.
#[inline]
pub fn guarded_loglog(x: f64) -> f64 {
    guarded_log(guarded_log(x))
}

/// Exponent pair of the weights `(log n)^a (log log n)^b / n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightParams {
    a: f64,
    b: f64,
}

impl WeightParams {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a > -1.0) || !a.is_finite() {
            return Err(domain(format!("weight exponent a must satisfy a > −1, got {a}")));
        }
        if !(b > -1.0) || !b.is_finite() {
            return Err(domain(format!("weight exponent b must satisfy b > −1, got {b}")));
        }
        Ok(Self { a, b })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// Critical level `1/√(1+a)` separating convergence from divergence.
    pub fn critical_eps(&self) -> f64 {
        1.0 / (1.0 + self.a).sqrt()
    }
}

/// `(log n)^a (log log n)^b / n`.
pub fn weight(n: u64, params: WeightParams) -> f64 {
    let x = n.max(1) as f64;
    guarded_log(x).powf(params.a) * guarded_loglog(x).powf(params.b) / x
}

/// Chung normalization `√(π² n / (8 log log n))`.
pub fn phi(n: u64) -> f64 {
    let x = n.max(1) as f64;
    (PI * PI * x / (8.0 * guarded_loglog(x))).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScheduleForm {
    Zero,
    TauOverLoglog,
}

/// Offset `a_n(ε)` added to the level ε.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpsilonSchedule {
    pub tau: f64,
    pub form: ScheduleForm,
}

impl EpsilonSchedule {
    pub fn zero() -> Self {
        Self {
            tau: 0.0,
            form: ScheduleForm::Zero,
        }
    }

    /// `a_n(ε) = τ / log log n`.
    pub fn tau_over_loglog(tau: f64) -> Self {
        Self {
            tau,
            form: ScheduleForm::TauOverLoglog,
        }
    }

    /// Offset for `n`; zero for the `Zero` form regardless of `tau`.
    pub fn offset(&self, n: u64) -> f64 {
        match self.form {
            ScheduleForm::Zero => 0.0,
            ScheduleForm::TauOverLoglog => self.tau / guarded_loglog(n.max(1) as f64),
        }
    }

    /// Limit of `a_n(ε) · log log n`.
    pub fn tau_limit(&self) -> f64 {
        match self.form {
            ScheduleForm::Zero => 0.0,
            ScheduleForm::TauOverLoglog => self.tau,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn guarded_logs_at_small_n() {
        assert_eq!(guarded_log(1.0), 1.0);
        assert_eq!(guarded_loglog(1.0), 1.0);
        assert_eq!(guarded_loglog(15.0), 1.0);
        assert!(guarded_loglog(16.0) > 1.0);
    }

    #[test]
    fn weight_examples() {
        let p = WeightParams::new(1.0, 1.0).unwrap();
        assert_eq!(weight(1, p), 1.0);
        assert_eq!(weight(1, WeightParams::new(-0.5, 3.0).unwrap()), 1.0);
        // n = 15 sits just below e^e, so log log 15 is guarded up to 1
        assert!((weight(15, p) - 15f64.ln() / 15.0).abs() < 1e-15);
        assert!((weight(15, p) - 0.180_536_68).abs() < 1e-8);
        let p0 = WeightParams::new(0.0, 0.0).unwrap();
        assert!((weight(1_000_000, p0) - 1e-6).abs() < 1e-20);
    }

    #[test]
    fn phi_examples() {
        assert!((phi(1) - (PI * PI / 8.0).sqrt()).abs() < 1e-15);
        assert!((phi(10_000) - 74.541_208_257_256).abs() < 1e-9);
        assert!((phi(1_000_000) - 685.448_335_032_82).abs() < 1e-8);
    }

    #[test]
    fn params_validation() {
        assert!(WeightParams::new(-1.0, 0.0).is_err());
        assert!(WeightParams::new(0.0, -1.0).is_err());
        assert!(WeightParams::new(f64::NAN, 0.0).is_err());
        assert!((WeightParams::new(3.0, 0.0).unwrap().critical_eps() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn schedule_offset_times_loglog_is_tau() {
        let s = EpsilonSchedule::tau_over_loglog(0.5);
        for &n in &[100u64, 10_000, 1 << 40] {
            assert!((s.offset(n) * guarded_loglog(n as f64) - 0.5).abs() < 1e-14);
        }
        assert_eq!(EpsilonSchedule::zero().offset(1000), 0.0);
    }
}
