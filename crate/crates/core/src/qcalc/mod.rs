//! Exact q-polynomials and the constants that govern cutoff.
//!
//! Everything is computed over `Z[q]` or `Q`; floating point appears only
//! in [`DriftConstants::c_constant`], the mixing schedule, and the
//! log-space norm budgets.

mod bounds;
mod constants;
mod gaussian;
mod moves;
mod poly;
mod schedule;

pub use bounds::{
    ball_bound_d3, fiber_bound, l2_norm_budget, sphere_size_d3, FiberBound, LogValue, NormBudget, SphereSize,
};
pub use constants::{
    drift_constants, drift_limit, increment_law, is_prime_power, ln_big, to_f64, two_step_drift_d3, DriftConstants,
};
pub use gaussian::{gaussian_binomial, gaussian_binomial_at, vertex_degree, vertex_degree_at};
pub use moves::{
    drift_polynomial, enumerate_moves, mass_polynomial, r_norm, r_weights, second_moment_polynomial, GammaMove,
};
pub use poly::QPolynomial;
pub use schedule::{mixing_schedule, GraphDistanceSchedule, MixingSchedule, TreeSchedule};
