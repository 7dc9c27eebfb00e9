//! Truncate-and-recenter diagnostics: the level `√n / (log n)^p`, the exact
//! variance sum `B_n`, and the simulated coupling gap `Δ_n`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, parameter, Result};
use crate::rngcore::Stream;
use crate::weights::guarded_log;

use super::distribution::{DistributionSpec, Sampler};
use super::estimate::McConfig;

/// Empirical summary of a sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quantiles {
    pub min: f64,
    pub q50: f64,
    pub q90: f64,
    pub q99: f64,
    pub max: f64,
    pub mean: f64,
}

impl Quantiles {
    /// Nearest-rank quantiles; `None` for an empty sample.
    pub fn of(mut xs: Vec<f64>) -> Option<Self> {
        if xs.is_empty() {
            return None;
        }
        xs.sort_by(f64::total_cmp);
        let at = |q: f64| {
            let rank = (q * xs.len() as f64).ceil() as usize;
            xs[rank.clamp(1, xs.len()) - 1]
        };
        Some(Quantiles {
            min: xs[0],
            q50: at(0.5),
            q90: at(0.9),
            q99: at(0.99),
            max: xs[xs.len() - 1],
            mean: xs.iter().sum::<f64>() / xs.len() as f64,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncationStats {
    pub n: u64,
    pub p_exponent: f64,
    pub threshold: f64,
    pub b_n: f64,
    pub b_n_over_n_sigma2: f64,
    pub delta_quantiles: Quantiles,
    pub reps: u64,
    pub seed: u64,
    pub dist: DistributionSpec,
}

fn check_exponent(p: f64) -> Result<()> {
    if p > 0.0 && p < 0.5 {
        Ok(())
    } else {
        Err(domain(format!("truncation exponent must satisfy 0 < p < 1/2, got {p}")))
    }
}

/// `√n / (log n)^p`.
pub fn truncation_threshold(n: u64, p: f64) -> f64 {
    let nf = n as f64;
    nf.sqrt() / guarded_log(nf).powf(p)
}

/// Exact `B_n = n Var(X I{|X| ≤ t})` at the truncation level for `n`.
pub fn analytic_b_n(dist: &DistributionSpec, n: u64, p: f64) -> Result<f64> {
    check_exponent(p)?;
    dist.validate()?;
    let (m1, m2) = dist.truncated_moments(truncation_threshold(n, p));
    Ok(n as f64 * (m2 - m1 * m1).max(0.0))
}

/// Monte Carlo estimate of `B_n` from `cfg.reps` draws, with its standard
/// error. Meant for cross-checking [`analytic_b_n`].
pub fn empirical_b_n(dist: &DistributionSpec, n: u64, p: f64, cfg: &McConfig) -> Result<(f64, f64)> {
    check_exponent(p)?;
    if cfg.reps < 2 {
        return Err(parameter("need at least 2 draws"));
    }
    let sampler = dist.sampler()?;
    let t = truncation_threshold(n, p);
    let mut stream = Stream::new(cfg.seed, 0);
    let xs: Vec<f64> = (0..cfg.reps)
        .map(|_| {
            let x = sampler.draw(&mut stream);
            if x.abs() <= t {
                x
            } else {
                0.0
            }
        })
        .collect();
    let k = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / k;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1.0);
    let m4 = xs.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / k;
    let se_var = ((m4 - var * var).max(0.0) / k).sqrt();
    Ok((n as f64 * var, n as f64 * se_var))
}

/// `Δ_n = max_{k≤n} |S*_k − S_k|` for one path.
fn coupling_gap(sampler: &Sampler, n: u64, t: f64, center: f64, stream: &mut Stream) -> f64 {
    let mut gap = 0.0f64;
    let mut worst = 0.0f64;
    for _ in 0..n {
        let x = sampler.draw(stream);
        let kept = if x.abs() <= t { x } else { 0.0 };
        gap += kept - center - x;
        worst = worst.max(gap.abs());
    }
    worst
}

pub fn truncation_stats(dist: &DistributionSpec, n: u64, p: f64, cfg: &McConfig) -> Result<TruncationStats> {
    check_exponent(p)?;
    if n == 0 {
        return Err(domain("n must be at least 1"));
    }
    if cfg.reps == 0 {
        return Err(parameter("need at least one replication"));
    }
    let sampler = dist.sampler()?;
    let threshold = truncation_threshold(n, p);
    let (center, _) = dist.truncated_moments(threshold);
    let b_n = analytic_b_n(dist, n, p)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads.max(1))
        .build()
        .map_err(|e| parameter(format!("cannot start worker pool: {e}")))?;
    let gaps: Vec<f64> = pool.install(|| {
        (0..cfg.reps)
            .into_par_iter()
            .map(|r| coupling_gap(&sampler, n, threshold, center, &mut Stream::new(cfg.seed, r)))
            .collect()
    });
    Ok(TruncationStats {
        n,
        p_exponent: p,
        threshold,
        b_n,
        b_n_over_n_sigma2: b_n / (n as f64 * dist.variance()),
        delta_quantiles: Quantiles::of(gaps).expect("reps ≥ 1"),
        reps: cfg.reps,
        seed: cfg.seed,
        dist: *dist,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn rademacher_untouched() {
        for n in [1u64, 2, 3, 16, 100, 12_345] {
            let s = truncation_stats(&DistributionSpec::Rademacher, n, 0.25, &McConfig::new(20, 1)).unwrap();
            assert!(s.threshold >= 1.0);
            assert_eq!(s.b_n, n as f64);
            assert_eq!(s.delta_quantiles.max, 0.0);
        }
    }

    #[test]
    fn normal_tail_negligible() {
        let n = 1_000_000;
        let t = truncation_threshold(n, 0.25);
        assert!((t - 518.690).abs() < 1e-3);
        let b = analytic_b_n(&DistributionSpec::StdNormal, n, 0.25).unwrap();
        assert!((b / n as f64 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn normal_truncated_variance_quadrature() {
        // Simpson oracle for ∫_{-t}^{t} x² φ(x) dx at a level where it matters
        let n = 16;
        let t = truncation_threshold(n, 0.4);
        let m = 20_000;
        let h = 2.0 * t / m as f64;
        let f = |x: f64| x * x * (-0.5 * x * x).exp() / (2.0 * PI).sqrt();
        let mut acc = f(-t) + f(t);
        for i in 1..m {
            acc += if i % 2 == 1 { 4.0 } else { 2.0 } * f(-t + i as f64 * h);
        }
        let q = acc * h / 3.0;
        let b = analytic_b_n(&DistributionSpec::StdNormal, n, 0.4).unwrap();
        assert!((b - n as f64 * q).abs() < 1e-11);
    }

    #[test]
    fn two_point_truncation_active() {
        let d = DistributionSpec::two_point_unit(10.0);
        let t = truncation_threshold(16, 0.25);
        assert!((t - 3.099_84).abs() < 1e-5);
        let b = analytic_b_n(&d, 16, 0.25).unwrap();
        assert!((b - 16.0 / 10_201.0).abs() < 1e-12);
        let s = truncation_stats(&d, 16, 0.25, &McConfig::new(2_000, 3)).unwrap();
        assert!(s.b_n < 16.0);
        assert!(s.delta_quantiles.max > 0.0);
    }

    #[test]
    fn exponent_checked() {
        for p in [0.0, 0.5, 0.6, -0.1, f64::NAN] {
            assert!(analytic_b_n(&DistributionSpec::Rademacher, 100, p).is_err());
            assert!(truncation_stats(&DistributionSpec::Rademacher, 100, p, &McConfig::new(5, 0)).is_err());
        }
    }

    #[test]
    fn empirical_matches_analytic() {
        let d = DistributionSpec::CenteredUniform { half_width: 3.0 };
        let n = 4;
        let (e, se) = empirical_b_n(&d, n, 0.3, &McConfig::new(200_000, 8)).unwrap();
        let a = analytic_b_n(&d, n, 0.3).unwrap();
        assert!(a < n as f64 * d.variance());
        assert!((e - a).abs() < 4.0 * se, "{e} vs {a}");
    }

    #[test]
    fn deterministic_gaps() {
        let d = DistributionSpec::two_point_unit(5.0);
        let a = truncation_stats(&d, 200, 0.3, &McConfig::new(64, 9).with_threads(1)).unwrap();
        let b = truncation_stats(&d, 200, 0.3, &McConfig::new(64, 9).with_threads(3)).unwrap();
        assert_eq!(a, b);
    }

    proptest! {
        #[test]
        fn ratio_in_unit_interval(n in 1u64..10_000_000, p in 0.01f64..0.49, which in 0usize..5) {
            let d = [
                DistributionSpec::Rademacher,
                DistributionSpec::StdNormal,
                DistributionSpec::CenteredUniform { half_width: 7.0 },
                DistributionSpec::two_point_unit(30.0),
                DistributionSpec::AtomsDoublyExp { c: 1.0, k_max: 6 },
            ][which];
            let r = analytic_b_n(&d, n, p).unwrap() / (n as f64 * d.variance());
            prop_assert!((0.0..=1.0 + 1e-15).contains(&r));
        }

        #[test]
        fn bounded_laws_exact_past_support(n in 1u64..1_000_000, p in 0.01f64..0.49) {
            let d = DistributionSpec::CenteredUniform { half_width: 1.0 };
            if truncation_threshold(n, p) >= 1.0 {
                let r = analytic_b_n(&d, n, p).unwrap() / (n as f64 * d.variance());
                prop_assert!((r - 1.0).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn ratio_tends_to_one() {
        for d in [DistributionSpec::StdNormal, DistributionSpec::two_point_unit(30.0)] {
            let r = |n: u64| analytic_b_n(&d, n, 0.25).unwrap() / (n as f64 * d.variance());
            assert!(r(1 << 40) >= r(16));
            assert!((r(1 << 40) - 1.0).abs() < 1e-9);
        }
    }
}
