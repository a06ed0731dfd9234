//! Simulation and exact-computation laboratory for multi-excited ("cookie")
//! random walks on the integers.
//!
//! A cookie environment assigns each site a finite stack of jump-right
//! probabilities in [1/2, 1]; the walker eats the bottom cookie of its
//! current site on every visit and steps right with that cookie's strength.
//! The crate provides:
//!
//! * [`env`] — environment laws, deterministic lazy realization, and the
//!   drift/leftover/shift transforms;
//! * [`walk`] — the step kernel, stopped runs with first-passage records,
//!   and the shared-uniform couplings;
//! * [`exact`] — path-sum, absorbing-chain, and down-crossing oracles for
//!   interval hitting probabilities, exit times, and escape bounds;
//! * [`estimate`] — parallel, reproducible Monte Carlo estimators with
//!   confidence intervals;
//! * [`experiments`] — the headline scenario runners (classification, phase
//!   scan, zero-speed diagnostics, leftover iteration, monotonicity suites);
//! * [`cli`] — the command-line frontend.

pub mod cli;
pub mod env;
pub mod estimate;
pub mod exact;
pub mod experiments;
pub mod rng;
pub mod walk;

pub use env::{CookieRow, EnvironmentSpec, EnvironmentView, PhasePolicy};
// pub use estimate::{Estimate, McConfig};
pub use rng::{RngStream, UniformSource};
pub use walk::{PassageRecord, StopCondition, StopReason, WalkState};
