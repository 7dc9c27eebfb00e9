//! Numerical companion to the precise asymptotics of Chung's law of the
//! iterated logarithm.
//!
//! * [`analytic`]: Brownian small-ball distribution, gamma functions and the
//!   closed-form limit constants.
//! * [`weights`]: the logarithmic weights, kernel sums and the integral tests
//!   `J(ψ)` and `J_ab(ψ)`.
//! * [`montecarlo`]: reproducible random-walk estimates of small-deviation
//!   probabilities, truncation diagnostics and tail-moment profiles.
//! * [`rngcore`]: counter-addressable random streams.
//! * [`cli`]: the `chung` command-line front end.

// `!(x > 0.0)` is used on purpose so NaN falls into the rejecting branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod cli;
pub mod error;
pub mod montecarlo;
pub mod rngcore;
pub mod weights;

pub use error::{Error, Result};

/// Crate version plus output-schema revision, embedded in every emitted record.
pub const VERSION_TAG: &str = concat!(env!("CARGO_PKG_VERSION"), "+schema.1");

/// Cooperative cancellation flag shared with long-running loops.
#[derive(Debug, Clone, Default)]
pub struct CancelToken(std::sync::Arc<std::sync::atomic::AtomicBool>);

impl CancelToken {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn cancel(&self) {
        self.0.store(true, std::sync::atomic::Ordering::Relaxed);
    }

    pub fn is_cancelled(&self) -> bool {
        self.0.load(std::sync::atomic::Ordering::Relaxed)
    }
}
