//! Replicated small-deviation estimates and the rate regression.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::small_ball_sup;
use crate::error::{domain, parameter, Error, Result};
use crate::rngcore::Stream;
use crate::weights::{guarded_loglog, phi, EpsilonSchedule};
use crate::CancelToken;

use super::distribution::DistributionSpec;
use super::walk::Walker;

pub const MIN_REPS: u64 = 100;

/// Replication budget and seeding shared by the simulation entry points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct McConfig {
    pub reps: u64,
    pub seed: u64,
    pub threads: usize,
}

impl McConfig {
    pub fn new(reps: u64, seed: u64) -> Self {
        McConfig {
            reps,
            seed,
            threads: 1,
        }
    }

    pub fn with_threads(mut self, threads: usize) -> Self {
        self.threads = threads;
        self
    }

    fn pool(&self) -> Result<rayon::ThreadPool> {
        if self.threads == 0 {
            return Err(parameter("thread count must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(self.threads)
            .build()
            .map_err(|e| parameter(format!("cannot start worker pool: {e}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub p_hat: f64,
    pub stderr: f64,
    pub reps: u64,
    pub successes: u64,
    pub seed: u64,
    pub n: u64,
    pub eps: f64,
    pub schedule: EpsilonSchedule,
    /// Barrier `σ φ(n) (ε + a_n(ε))` on `M_n`.
    pub threshold: f64,
    pub dist: DistributionSpec,
    /// Brownian small-ball probability at the same normalized barrier.
    pub reference: f64,
}

impl McEstimate {
    pub fn deviation(&self) -> f64 {
        self.p_hat - self.reference
    }
}

/// Count replications whose indicator holds; the total does not depend on
/// how work is split across threads.
fn count_successes<F>(cfg: &McConfig, cancel: Option<&CancelToken>, trial: F) -> Result<u64>
where
    F: Fn(&mut Stream) -> bool + Sync,
{
    let pool = cfg.pool()?;
    let hits = pool.install(|| {
        (0..cfg.reps)
            .into_par_iter()
            .map(|r| {
                if cancel.is_some_and(CancelToken::is_cancelled) {
                    return None;
                }
                Some(u64::from(trial(&mut Stream::new(cfg.seed, r))))
            })
            .try_reduce(|| 0, |a, b| Some(a + b))
    });
    hits.ok_or(Error::Cancelled)
}

/// Estimate `P(M_n ≤ σ φ(n) (ε + a_n(ε)))`.
pub fn estimate_small_dev(
    dist: &DistributionSpec,
    n: u64,
    eps: f64,
    schedule: EpsilonSchedule,
    cfg: &McConfig,
    cancel: Option<&CancelToken>,
) -> Result<McEstimate> {
    if n < 2 {
        return Err(domain(format!("walk length must be at least 2, got {n}")));
    }
    if !(eps >= 0.0) || !eps.is_finite() {
        return Err(domain(format!("ε must be a finite non-negative real, got {eps}")));
    }
    if cfg.reps < MIN_REPS {
        return Err(parameter(format!("need at least {MIN_REPS} replications, got {}", cfg.reps)));
    }
    let walker = Walker::new(dist)?;
    let level = eps + schedule.offset(n);
    let threshold = dist.sigma() * phi(n) * level;
    log::debug!("mc: {} n={n} barrier={threshold} reps={}", dist.summary(), cfg.reps);
    let successes = count_successes(cfg, cancel, |s| walker.stays_within(n, threshold, s))?;
    let p_hat = successes as f64 / cfg.reps as f64;
    let x = phi(n) * level / (n as f64).sqrt();
    let reference = if x > 0.0 {
        small_ball_sup(x, 1e-12)?.value
    } else {
        0.0
    };
    Ok(McEstimate {
        p_hat,
        stderr: (p_hat * (1.0 - p_hat) / cfg.reps as f64).sqrt(),
        reps: cfg.reps,
        successes,
        seed: cfg.seed,
        n,
        eps,
        schedule,
        threshold,
        dist: *dist,
        reference,
    })
}

/// Estimate `P(max_k |S_k| ≤ x √n)` for a Gaussian walk, the discrete
/// stand-in for the Brownian small-ball probability.
pub fn brownian_small_ball(x: f64, n: u64, cfg: &McConfig, cancel: Option<&CancelToken>) -> Result<(f64, f64)> {
    if !(x > 0.0) {
        return Err(domain(format!("x must be positive, got {x}")));
    }
    let walker = Walker::new(&DistributionSpec::StdNormal)?;
    let h = x * (n as f64).sqrt();
    let hits = count_successes(cfg, cancel, |s| walker.stays_within(n, h, s))?;
    let p = hits as f64 / cfg.reps as f64;
    Ok((p, (p * (1.0 - p) / cfg.reps as f64).sqrt()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateRegression {
    pub n_grid: Vec<u64>,
    pub p_hats: Vec<f64>,
    pub slope: f64,
    pub intercept: f64,
    pub expected_slope: f64,
    pub estimates: Vec<McEstimate>,
}

impl RateRegression {
    /// Whether `p_hat` never increases along the grid by more than
    /// `slack` combined standard errors.
    pub fn decreasing_within(&self, slack: f64) -> bool {
        self.estimates.windows(2).all(|w| {
            let se = w[0].stderr.hypot(w[1].stderr);
            w[1].p_hat <= w[0].p_hat + slack * se
        })
    }
}

/// Least-squares slope of `ln p_hat` against `log log n`.
pub fn rate_regression(
    dist: &DistributionSpec,
    eps: f64,
    n_grid: &[u64],
    cfg: &McConfig,
    cancel: Option<&CancelToken>,
) -> Result<RateRegression> {
    if n_grid.len() < 4 {
        return Err(parameter(format!("rate regression needs at least 4 grid points, got {}", n_grid.len())));
    }
    if n_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(parameter("n grid must be strictly increasing"));
    }
    if !(eps > 0.0) {
        return Err(domain(format!("ε must be positive, got {eps}")));
    }
    let mut estimates = Vec::with_capacity(n_grid.len());
    for &n in n_grid {
        let est = estimate_small_dev(dist, n, eps, EpsilonSchedule::zero(), cfg, cancel)?;
        if est.successes < 10 {
            return Err(Error::InsufficientData {
                n,
                reason: format!("only {} of {} paths stayed below the barrier", est.successes, est.reps),
            });
        }
        estimates.push(est);
    }
    let xs: Vec<f64> = n_grid.iter().map(|&n| guarded_loglog(n as f64)).collect();
    let ys: Vec<f64> = estimates.iter().map(|e| e.p_hat.ln()).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(parameter("grid must span distinct values of log log n"));
    }
    let slope = sxy / sxx;
    Ok(RateRegression {
        n_grid: n_grid.to_vec(),
        p_hats: ys.iter().map(|y| y.exp()).collect(),
        slope,
        intercept: my - slope * mx,
        expected_slope: -(1.0 / eps).powi(2),
        estimates,
    })
}
