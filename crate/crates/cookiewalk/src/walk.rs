//! The history-dependent walk kernel.
//!
//! The walk's transition law needs only the current position and how often
//! each site has been occupied, so the state keeps a visit ledger instead of
//! the full history. The ledger is a hash map keyed by site: transient walks
//! visit unbounded ranges, and walks never pay for sites they do not touch.

use std::collections::HashMap;

use rustc_hash::FxBuildHasher;
use serde::Serialize;
use thiserror::Error;

use crate::env::EnvironmentView;
use crate::rng::UniformSource;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WalkError {
    #[error("hit_either requires left < position < right, got {left} / {position} / {right}")]
    BadInterval { left: i64, position: i64, right: i64 },
    #[error("coupled walk probabilities must satisfy 1/2 < p1 <= p2 < 1, got {p1}, {p2}")]
    BadCouplingParams { p1: f64, p2: f64 },
}

/// Walker state: position, step count, visit ledger, and the drift consumed
/// so far, split by the sign of the site.
#[derive(Debug, Clone)]
pub struct WalkState {
    position: i64,
    start: i64,
    steps: u64,
    visits: HashMap<i64, u32, FxBuildHasher>,
    drift_nonneg: f64,
    drift_neg: f64,
}

impl WalkState {
    pub fn new(start: i64) -> Self {
        let mut visits = HashMap::with_capacity_and_hasher(64, FxBuildHasher);
        visits.insert(start, 1);
        Self {
            position: start,
            start,
            steps: 0,
            visits,
            drift_nonneg: 0.0,
            drift_neg: 0.0,
        }
    }

    pub fn position(&self) -> i64 {
        self.position
    }

    pub fn start(&self) -> i64 {
        self.start
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    /// Occupation count of `site` up to and including the current time.
    pub fn visits_at(&self, site: i64) -> u32 {
        self.visits.get(&site).copied().unwrap_or(0)
    }

    pub fn visited_sites(&self) -> impl Iterator<Item = (i64, u32)> + '_ {
        self.visits.iter().map(|(&x, &c)| (x, c))
    }

    /// Drift consumed at sites >= 0.
    pub fn drift_nonneg(&self) -> f64 {
        self.drift_nonneg
    }

    /// Drift consumed at sites < 0.
    pub fn drift_neg(&self) -> f64 {
        self.drift_neg
    }

    /// Total drift consumed so far.
    pub fn drift_total(&self) -> f64 {
        self.drift_nonneg + self.drift_neg
    }

    /// Cookies eaten at `site`: departures, i.e. visits minus one if the
    /// walker currently sits there.
    pub fn eaten_at(&self, site: i64) -> u32 {
        let v = self.visits_at(site);
        if self.position == site {
            v.saturating_sub(1)
        } else {
            v
        }
    }

    /// Drift consumed at one site, recomputed from the ledger and the view.
    pub fn consumed_drift_at(&self, view: &EnvironmentView, site: i64) -> f64 {
        let eaten = self.eaten_at(site);
        let row = view.residual_row(site);
        let upto = (eaten as usize).min(row.len());
        row.strengths()[..upto].iter().map(|s| 2.0 * s - 1.0).sum()
    }

    /// One step of the walk driven by the uniform `u`; returns the new
    /// position. Moves right iff `u` is below the strength of the cookie
    /// being eaten; the cookie's drift is booked the moment it is eaten
    /// (tail cookies contribute nothing and skip the ledger write).
    #[inline]
    pub fn step(&mut self, view: &EnvironmentView, u: f64) -> i64 {
        let visit = *self.visits.get(&self.position).expect("current site is visited");
        let s = view.strength(self.position, visit);
        let drift = 2.0 * s - 1.0;
        if drift != 0.0 {
            if self.position >= 0 {
                self.drift_nonneg += drift;
            } else {
                self.drift_neg += drift;
            }
        }
        self.position += if u < s { 1 } else { -1 };
        self.steps += 1;
        *self.visits.entry(self.position).or_insert(0) += 1;
        self.position
    }
}

/// First-passage bookkeeping: step index at which each level was first
/// occupied. Absent level means not reached.
#[derive(Debug, Clone, Default, Serialize)]
pub struct PassageRecord {
    times: std::collections::BTreeMap<i64, u64>,
}

impl PassageRecord {
    fn record(&mut self, level: i64, step: u64) {
        self.times.entry(level).or_insert(step);
    }

    pub fn time(&self, level: i64) -> Option<u64> {
        self.times.get(&level).copied()
    }

    pub fn levels(&self) -> impl Iterator<Item = (i64, u64)> + '_ {
        self.times.iter().map(|(&k, &t)| (k, t))
    }

    pub fn max_level(&self) -> Option<i64> {
        self.times.keys().next_back().copied()
    }

    /// T_{j+1} - T_j where both passage times exist.
    pub fn gap_above(&self, level: i64) -> Option<u64> {
        Some(self.time(level + 1)? - self.time(level)?)
    }
}

/// What to wait for. `max_steps` caps the run regardless of the event.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StopCondition {
    pub event: StopEvent,
    pub max_steps: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopEvent {
    /// Run until the step budget alone is exhausted.
    None,
    /// First passage of a level.
    HitLevel(i64),
    /// Exit of an interval: first passage of either endpoint.
    HitEither { left: i64, right: i64 },
}

impl StopCondition {
    pub fn max_steps(n: u64) -> Self {
        Self { event: StopEvent::None, max_steps: Some(n) }
    }

    pub fn hit_level(level: i64) -> Self {
        Self { event: StopEvent::HitLevel(level), max_steps: None }
    }

    pub fn hit_either(left: i64, right: i64) -> Self {
        Self { event: StopEvent::HitEither { left, right }, max_steps: None }
    }

    pub fn capped(mut self, max_steps: u64) -> Self {
        self.max_steps = Some(max_steps);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum StopReason {
    HitLevel(i64),
    HitLeft(i64),
    HitRight(i64),
    /// Step budget exhausted before the event: the run is censored, not
    /// failed, and callers must treat it as such.
    Truncated,
}

fn event_fired(event: &StopEvent, position: i64) -> Option<StopReason> {
    match *event {
        StopEvent::None => None,
        StopEvent::HitLevel(k) => (position == k).then_some(StopReason::HitLevel(k)),
        StopEvent::HitEither { left, right } => {
            if position == left {
                Some(StopReason::HitLeft(left))
            } else if position == right {
                Some(StopReason::HitRight(right))
            } else {
                None
            }
        }
    }
}

/// Run until the stop condition fires or the step budget runs out, recording
/// first-passage times of every level touched. Consumes exactly one uniform
/// per step taken.
pub fn run_until(
    mut state: WalkState,
    view: &EnvironmentView,
    stop: StopCondition,
    rng: &mut impl UniformSource,
) -> Result<(WalkState, PassageRecord, StopReason), WalkError> {
    if let StopEvent::HitEither { left, right } = stop.event {
        if !(left < state.position && state.position < right) {
            return Err(WalkError::BadInterval {
                left,
                position: state.position,
                right,
            });
        }
    }
    let mut record = PassageRecord::default();
    record.record(state.position, state.steps);
    if let Some(reason) = event_fired(&stop.event, state.position) {
        return Ok((state, record, reason));
    }
    loop {
        if let Some(cap) = stop.max_steps {
            if state.steps >= cap {
                return Ok((state, record, StopReason::Truncated));
            }
        }
        let pos = state.step(view, rng.next_uniform());
        record.record(pos, state.steps);
        if let Some(reason) = event_fired(&stop.event, pos) {
            return Ok((state, record, reason));
        }
    }
}

/// Like [`run_until`] but also returns the full path, for callers that need
/// the trajectory (leftover transforms, ledger cross-checks).
pub fn run_until_with_path(
    state: WalkState,
    view: &EnvironmentView,
    stop: StopCondition,
    rng: &mut impl UniformSource,
) -> Result<(WalkState, PassageRecord, StopReason, Vec<i64>), WalkError> {
    let mut path = Vec::with_capacity(stop.max_steps.unwrap_or(1024).min(1 << 20) as usize + 1);
    if let StopEvent::HitEither { left, right } = stop.event {
        if !(left < state.position && state.position < right) {
            return Err(WalkError::BadInterval {
                left,
                position: state.position,
                right,
            });
        }
    }
    let mut state = state;
    let mut record = PassageRecord::default();
    record.record(state.position, state.steps);
    path.push(state.position);
    if let Some(reason) = event_fired(&stop.event, state.position) {
        return Ok((state, record, reason, path));
    }
    loop {
        if let Some(cap) = stop.max_steps {
            if state.steps >= cap {
                return Ok((state, record, StopReason::Truncated, path));
            }
        }
        let pos = state.step(view, rng.next_uniform());
        path.push(pos);
        record.record(pos, state.steps);
        if let Some(reason) = event_fired(&stop.event, pos) {
            return Ok((state, record, reason, path));
        }
    }
}

/// Drive the excited walk and a simple symmetric walk with the same uniform
/// sequence: the excited walk moves right iff u < strength, the symmetric one
/// iff u < 1/2. Since every strength is >= 1/2 the symmetric walk never gets
/// ahead.
pub fn run_coupled_dominating(
    view: &EnvironmentView,
    start: i64,
    horizon: u64,
    rng: &mut impl UniformSource,
) -> (Vec<i64>, Vec<i64>) {
    let mut excited = WalkState::new(start);
    let mut symmetric = start;
    let mut traj_x = Vec::with_capacity(horizon as usize + 1);
    let mut traj_y = Vec::with_capacity(horizon as usize + 1);
    traj_x.push(start);
    traj_y.push(start);
    for _ in 0..horizon {
        let u = rng.next_uniform();
        traj_x.push(excited.step(view, u));
        symmetric += if u < 0.5 { 1 } else { -1 };
        traj_y.push(symmetric);
    }
    (traj_x, traj_y)
}

/// Result of the shared-uniform coupling of two once-excited walks.
#[derive(Debug, Clone)]
pub struct NaiveCoupling {
    pub weak: Vec<i64>,
    pub strong: Vec<i64>,
    /// First step index at which the weak walk is strictly ahead, if any.
    pub overtake_at: Option<u64>,
}

impl NaiveCoupling {
    pub fn overtook(&self) -> bool {
        self.overtake_at.is_some()
    }
}

/// The naive shared-uniform coupling of two once-excited walks with first
/// cookie strengths p1 <= p2: each walk moves right on a first visit iff
/// u < p_j and on any later visit iff u < 1/2. Despite the pointwise
/// environment ordering the weak walk can overtake the strong one.
pub fn run_coupled_naive(
    p1: f64,
    p2: f64,
    horizon: u64,
    rng: &mut impl UniformSource,
) -> Result<NaiveCoupling, WalkError> {
    if !(0.5 < p1 && p1 <= p2 && p2 < 1.0) {
        return Err(WalkError::BadCouplingParams { p1, p2 });
    }
    let mut weak = OnceExcited::new(p1);
    let mut strong = OnceExcited::new(p2);
    let mut traj1 = vec![0i64];
    let mut traj2 = vec![0i64];
    let mut overtake_at = None;
    for n in 1..=horizon {
        let u = rng.next_uniform();
        let x1 = weak.step(u);
        let x2 = strong.step(u);
        traj1.push(x1);
        traj2.push(x2);
        if overtake_at.is_none() && x1 > x2 {
            overtake_at = Some(n);
        }
    }
    Ok(NaiveCoupling { weak: traj1, strong: traj2, overtake_at })
}

/// Once-excited walk from 0: biased only while standing on a site for the
/// first time.
pub(crate) struct OnceExcited {
    p: f64,
    position: i64,
    first_visit_now: bool,
    seen: std::collections::HashSet<i64, FxBuildHasher>,
}

impl OnceExcited {
    pub(crate) fn new(p: f64) -> Self {
        let mut seen = std::collections::HashSet::with_capacity_and_hasher(32, FxBuildHasher);
        seen.insert(0);
        Self { p, position: 0, first_visit_now: true, seen }
    }

    #[inline]
    pub(crate) fn step(&mut self, u: f64) -> i64 {
        let threshold = if self.first_visit_now { self.p } else { 0.5 };
        self.position += if u < threshold { 1 } else { -1 };
        self.first_visit_now = self.seen.insert(self.position);
        self.position
    }
}
