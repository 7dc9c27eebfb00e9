//! Reproducible random-walk experiments.
//!
//! Every replication `r` draws from its own stream `(seed, r)`, and results
//! are reduced by summing counts, so estimates are identical for any number
//! of worker threads.

mod distribution;
mod estimate;
mod truncation;
mod walk;

pub use distribution::{
    condition_profile, normal_tail_second_moment, sample, DistributionSpec, LogT, ProfilePoint, Sampler,
    ATOMS_SAMPLABLE_K_MAX,
};
pub use estimate::{brownian_small_ball, estimate_small_dev, rate_regression, McConfig, McEstimate, RateRegression, MIN_REPS};
pub use truncation::{analytic_b_n, empirical_b_n, truncation_stats, truncation_threshold, Quantiles, TruncationStats};
pub use walk::{max_abs_stepwise, stays_within_stepwise, walk_max_abs, Walker};
