//! Exact numerical oracles for the walk on an interval.
//!
//! Three independent routes compute interval quantities:
//!
//! * [`path_sum_event_prob`] enumerates every nearest-neighbor path up to a
//!   small horizon — the ground-truth oracle for finite-time events;
//! * [`CappedChain`] enumerates the full (position, remaining-cookie-counts)
//!   state space on an interval and solves the absorption systems directly;
//! * [`interval_hitting_prob`] propagates edge down-crossing counts from the
//!   right endpoint leftward, which scales to intervals far beyond the
//!   chain's state budget.
//!
//! The routes are cross-checked against each other in the test suite.

mod chain;
mod downcross;
mod pathsum;

pub use chain::{
    build_capped_chain, finite_horizon_event_prob, solve_expected_exit_time,
    solve_expected_exit_time_rational, solve_hitting_prob, solve_hitting_prob_rational,
    CappedChain, SolveReport, Transition, TransitionTarget, DEFAULT_STATE_BUDGET,
};
pub use downcross::{
    escape_prob_upper_bounds, interval_hitting_prob, interval_hitting_prob_with_loss,
    revisit_prob_estimate, DowncrossOpts, EscapeBound, RevisitBound,
};
pub use pathsum::{path_sum_event_prob, PATH_SUM_HORIZON_CAP};

use thiserror::Error;

use crate::env::EnvError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExactError {
    #[error("horizon {horizon} above path-sum cap {cap}; use the capped-chain solver")]
    HorizonAboveCap { horizon: u64, cap: u64 },
    #[error("event horizon must be finite for path enumeration")]
    InfiniteHorizon,
    #[error("state budget exceeded: chain needs {required} states, budget {budget}")]
    BudgetExceeded { required: u128, budget: usize },
    #[error("need left < start < right, got {left} / {start} / {right}")]
    BadInterval { left: i64, start: i64, right: i64 },
    #[error("start {start} outside [{left}, {right}]")]
    StartOutside { left: i64, start: i64, right: i64 },
    #[error("event requires barrier < target, got {barrier} >= {target}")]
    BadEvent { barrier: i64, target: i64 },
    #[error("down-crossing tail mass {lost} not bounded below {tol} at cap {cap}")]
    TailNotBounded { lost: f64, tol: f64, cap: usize },
    #[error(transparent)]
    Env(#[from] EnvError),
}

/// The event `T_target <= T_barrier /\ horizon`: reach `target` by time
/// `horizon` without touching `barrier` first. `None` means no time cap.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EventSpec {
    pub barrier: i64,
    pub target: i64,
    pub horizon: Option<u64>,
}

impl EventSpec {
    pub fn new(barrier: i64, target: i64, horizon: Option<u64>) -> Result<Self, ExactError> {
        if barrier >= target {
            return Err(ExactError::BadEvent { barrier, target });
        }
        Ok(Self { barrier, target, horizon })
    }
}
