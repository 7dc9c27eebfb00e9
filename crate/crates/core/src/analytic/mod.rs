//! Exact special-function layer: Brownian small-ball probabilities, gamma
//! functions and the limit constants of the weighted series.

mod constants;
mod gamma;
mod small_ball;

pub use constants::{
    alt_odd_series, critical_limit_constant, large_eps_limit_constant, LimitConstant, LimitKind,
};
pub use gamma::{gamma_fn, ln_gamma, upper_incomplete_gamma};
pub use small_ball::{
    normal_sf, reflection_series, small_ball_asymptotic, small_ball_bounds, small_ball_sup,
    theta_series, Representation, SmallBallResult, DEFAULT_TOL, MAX_TOL, SWITCH_X,
};
