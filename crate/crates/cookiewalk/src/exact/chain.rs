//! Absorbing chain over (position, remaining-cookie-counts) states.
//!
//! On an interval with absorbing endpoints the quenched walk is a finite
//! Markov chain once each interior site carries a finite cookie row: the
//! state is the walker position together with how many cookies remain at
//! each site. Counts only ever decrease, so ordering states by total
//! remaining count makes the absorption systems block-triangular: states
//! that still hold a cookie resolve directly against the level below, and
//! the cookie-free stretches of each level form discrete Dirichlet problems
//! with closed-form solutions. The solve is a single sweep, no iteration,
//! and works verbatim over exact rationals.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::env::{CookieRow, EnvironmentView};

use super::ExactError;

/// Default ceiling on the enumerated state count.
pub const DEFAULT_STATE_BUDGET: usize = 5_000_000;

/// Enumerated absorbing chain on the open interval (left, right).
#[derive(Debug, Clone)]
pub struct CappedChain {
    left: i64,
    right: i64,
    /// Residual rows of the interior sites left+1 ..= right-1.
    rows: Vec<CookieRow>,
    /// radix per site: row length + 1 possible remaining counts.
    radices: Vec<u64>,
    /// Mixed-radix strides, site 0 most significant (lexicographic codes).
    strides: Vec<u64>,
    count_space: u64,
    n_states: usize,
}

impl CappedChain {
    pub fn left(&self) -> i64 {
        self.left
    }

    pub fn right(&self) -> i64 {
        self.right
    }

    pub fn width(&self) -> usize {
        self.rows.len()
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    fn site_of(&self, pos_idx: usize) -> i64 {
        self.left + 1 + pos_idx as i64
    }

    fn pos_index(&self, site: i64) -> Option<usize> {
        (self.left < site && site < self.right).then(|| (site - self.left - 1) as usize)
    }

    fn state(&self, pos_idx: usize, code: u64) -> usize {
        (pos_idx as u64 * self.count_space + code) as usize
    }

    /// Count code with every cookie still present.
    fn full_code(&self) -> u64 {
        self.radices
            .iter()
            .zip(&self.strides)
            .map(|(r, s)| (r - 1) * s)
            .sum()
    }

    fn digits(&self, code: u64, out: &mut [u64]) {
        for (i, (&stride, &radix)) in self.strides.iter().zip(&self.radices).enumerate() {
            out[i] = (code / stride) % radix;
        }
    }

    /// Strength read when a cookie is eaten at interior index `pos_idx`
    /// with `remaining` cookies left there.
    fn eat_strength(&self, pos_idx: usize, remaining: u64) -> f64 {
        debug_assert!(remaining >= 1);
        let row = &self.rows[pos_idx];
        row.strength_at_index((row.len() as u64 - remaining + 1) as u32)
    }

    /// Sparse transition structure, two arcs per state.
    pub fn transitions(&self) -> impl Iterator<Item = Transition> + '_ {
        let width = self.width();
        (0..self.n_states).flat_map(move |state| {
            let pos_idx = state / self.count_space as usize;
            let code = (state as u64) % self.count_space;
            let c = (code / self.strides[pos_idx]) % self.radices[pos_idx];
            let (p_right, next_code) = if c > 0 {
                (self.eat_strength(pos_idx, c), code - self.strides[pos_idx])
            } else {
                (0.5, code)
            };
            let to_right = if pos_idx + 1 == width {
                TransitionTarget::AbsorbRight
            } else {
                TransitionTarget::State(self.state(pos_idx + 1, next_code) as u64)
            };
            let to_left = if pos_idx == 0 {
                TransitionTarget::AbsorbLeft
            } else {
                TransitionTarget::State(self.state(pos_idx - 1, next_code) as u64)
            };
            [
                Transition { from: state as u64, to: to_right, prob: p_right },
                Transition { from: state as u64, to: to_left, prob: 1.0 - p_right },
            ]
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transition {
    pub from: u64,
    pub to: TransitionTarget,
    pub prob: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransitionTarget {
    State(u64),
    AbsorbLeft,
    AbsorbRight,
}

/// Enumerate the chain for the view's residual rows on (left, right).
pub fn build_capped_chain(
    view: &EnvironmentView,
    left: i64,
    right: i64,
    budget: usize,
) -> Result<CappedChain, ExactError> {
    if right - left < 2 {
        return Err(ExactError::BadInterval { left, start: left + 1, right });
    }
    let width = (right - left - 1) as usize;
    let rows: Vec<CookieRow> = (0..width)
        .map(|i| view.residual_row(left + 1 + i as i64))
        .collect();
    let radices: Vec<u64> = rows.iter().map(|r| r.len() as u64 + 1).collect();
    let mut required: u128 = width as u128;
    for &r in &radices {
        required = required.saturating_mul(r as u128);
    }
    if required > budget as u128 {
        return Err(ExactError::BudgetExceeded { required, budget });
    }
    let mut strides = vec![1u64; width];
    for i in (0..width.saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * radices[i + 1];
    }
    let count_space = strides[0] * radices[0];
    Ok(CappedChain {
        left,
        right,
        rows,
        radices,
        strides,
        count_space,
        n_states: (width as u64 * count_space) as usize,
    })
}

/// Scalar the direct solver runs over: f64 for speed, BigRational for
/// bit-exact answers when the strengths are (dyadic) rationals.
pub trait ChainScalar: Clone {
    fn from_f64_exact(x: f64) -> Self;
    fn from_u64(n: u64) -> Self;
    fn zero() -> Self;
    fn one() -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
}

impl ChainScalar for f64 {
    fn from_f64_exact(x: f64) -> Self {
        x
    }
    fn from_u64(n: u64) -> Self {
        n as f64
    }
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
}

impl ChainScalar for BigRational {
    fn from_f64_exact(x: f64) -> Self {
        BigRational::from_float(x).expect("finite strength")
    }
    fn from_u64(n: u64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Absorption {
    /// h = P[absorb at right before left].
    HittingRight,
    /// g = E[steps to absorption].
    ExitTime,
}

/// One sweep over count levels in increasing total-remaining order.
fn solve_absorption<S: ChainScalar>(chain: &CappedChain, problem: Absorption) -> Vec<S> {
    let width = chain.width();
    let (left_val, right_val, source) = match problem {
        Absorption::HittingRight => (S::zero(), S::one(), S::zero()),
        Absorption::ExitTime => (S::zero(), S::zero(), S::one()),
    };
    let max_total: u64 = chain.radices.iter().map(|r| r - 1).sum();
    let mut buckets: Vec<Vec<u64>> = vec![Vec::new(); max_total as usize + 1];
    let mut digits = vec![0u64; width];
    for code in 0..chain.count_space {
        chain.digits(code, &mut digits);
        let total: u64 = digits.iter().sum();
        buckets[total as usize].push(code);
    }

    let mut values: Vec<S> = vec![S::zero(); chain.n_states];

    for bucket in &buckets {
        for &code in bucket {
            chain.digits(code, &mut digits);
            // States still holding a cookie resolve against the level below.
            for p in 0..width {
                let c = digits[p];
                if c == 0 {
                    continue;
                }
                let s = S::from_f64_exact(chain.eat_strength(p, c));
                let next_code = code - chain.strides[p];
                let right = if p + 1 == width {
                    right_val.clone()
                } else {
                    values[chain.state(p + 1, next_code)].clone()
                };
                let left = if p == 0 {
                    left_val.clone()
                } else {
                    values[chain.state(p - 1, next_code)].clone()
                };
                let v = s
                    .mul(&right)
                    .add(&S::one().sub(&s).mul(&left))
                    .add(&source);
                values[chain.state(p, code)] = v;
            }
            // Cookie-free stretches are symmetric-walk Dirichlet problems:
            // harmonic part interpolates linearly, the unit source adds the
            // d*(n-d) exit-time profile.
            let mut run_start = None;
            for p in 0..=width {
                let zero_here = p < width && digits[p] == 0;
                if zero_here {
                    run_start.get_or_insert(p);
                    continue;
                }
                if let Some(a) = run_start.take() {
                    let b = p - 1;
                    let v_left = if a == 0 {
                        left_val.clone()
                    } else {
                        values[chain.state(a - 1, code)].clone()
                    };
                    let v_right = if b + 1 == width {
                        right_val.clone()
                    } else {
                        values[chain.state(b + 1, code)].clone()
                    };
                    let span = S::from_u64((b - a + 2) as u64);
                    for (i, q) in (a..=b).enumerate() {
                        let d = S::from_u64(i as u64 + 1);
                        let mut v = v_left.add(
                            &v_right.sub(&v_left).mul(&d).div(&span),
                        );
                        if matches!(problem, Absorption::ExitTime) {
                            v = v.add(&d.mul(&span.sub(&d)));
                        }
                        values[chain.state(q, code)] = v;
                    }
                }
            }
        }
    }
    values
}

fn initial_state(chain: &CappedChain, start: i64) -> Result<usize, ExactError> {
    let pos_idx = chain.pos_index(start).ok_or(ExactError::StartOutside {
        left: chain.left,
        start,
        right: chain.right,
    })?;
    Ok(chain.state(pos_idx, chain.full_code()))
}

/// P[absorb at right before left] from `start` with all cookies present.
pub fn solve_hitting_prob(chain: &CappedChain, start: i64) -> Result<f64, ExactError> {
    let idx = initial_state(chain, start)?;
    let values = solve_absorption::<f64>(chain, Absorption::HittingRight);
    Ok(values[idx])
}

/// Same system over exact rationals.
pub fn solve_hitting_prob_rational(
    chain: &CappedChain,
    start: i64,
) -> Result<BigRational, ExactError> {
    let idx = initial_state(chain, start)?;
    let values = solve_absorption::<BigRational>(chain, Absorption::HittingRight);
    Ok(values[idx].clone())
}

/// Expected number of steps to absorption from `start`.
pub fn solve_expected_exit_time(chain: &CappedChain, start: i64) -> Result<f64, ExactError> {
    let idx = initial_state(chain, start)?;
    let values = solve_absorption::<f64>(chain, Absorption::ExitTime);
    Ok(values[idx])
}

pub fn solve_expected_exit_time_rational(
    chain: &CappedChain,
    start: i64,
) -> Result<BigRational, ExactError> {
    let idx = initial_state(chain, start)?;
    let values = solve_absorption::<BigRational>(chain, Absorption::ExitTime);
    Ok(values[idx].clone())
}

/// P[T_right <= T_left /\ horizon] by backward value iteration on the chain;
/// the finite-horizon counterpart of [`solve_hitting_prob`], exact up to f64
/// rounding and cross-checkable against the path-sum oracle.
pub fn finite_horizon_event_prob(
    chain: &CappedChain,
    start: i64,
    horizon: u64,
) -> Result<f64, ExactError> {
    let idx = initial_state(chain, start)?;
    let width = chain.width();
    let mut cur = vec![0.0f64; chain.n_states];
    let mut next = vec![0.0f64; chain.n_states];
    let mut digits = vec![0u64; width];
    for _ in 0..horizon {
        for pos_idx in 0..width {
            for code in 0..chain.count_space {
                chain.digits(code, &mut digits);
                let c = digits[pos_idx];
                let (s, next_code) = if c > 0 {
                    (chain.eat_strength(pos_idx, c), code - chain.strides[pos_idx])
                } else {
                    (0.5, code)
                };
                let right = if pos_idx + 1 == width {
                    1.0
                } else {
                    cur[chain.state(pos_idx + 1, next_code)]
                };
                let left = if pos_idx == 0 {
                    0.0
                } else {
                    cur[chain.state(pos_idx - 1, next_code)]
                };
                next[chain.state(pos_idx, code)] = s * right + (1.0 - s) * left;
            }
        }
        std::mem::swap(&mut cur, &mut next);
    }
    Ok(cur[idx])
}

/// Solve diagnostics for machine-readable reports. `residual` is the
/// maximum defect of the returned values in the absorption system, measured
/// by a full verification sweep.
#[derive(Debug, Clone, serde::Serialize)]
pub struct SolveReport {
    pub states: usize,
    pub residual: f64,
    pub value: f64,
}

pub(crate) fn hitting_report(chain: &CappedChain, start: i64) -> Result<SolveReport, ExactError> {
    let idx = initial_state(chain, start)?;
    let values = solve_absorption::<f64>(chain, Absorption::HittingRight);
    let mut residual = 0.0f64;
    for t in chain.transitions().collect::<Vec<_>>().chunks(2) {
        let from = t[0].from as usize;
        let expect: f64 = t
            .iter()
            .map(|tr| {
                tr.prob
                    * match tr.to {
                        TransitionTarget::State(s) => values[s as usize],
                        TransitionTarget::AbsorbLeft => 0.0,
                        TransitionTarget::AbsorbRight => 1.0,
                    }
            })
            .sum();
        residual = residual.max((values[from] - expect).abs());
    }
    Ok(SolveReport { states: chain.n_states, residual, value: values[idx] })
}

/// Exit-time identity `2(k-1)` check helper and related rational formatting.
pub(crate) fn rational_to_string(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub(crate) fn rational_abs_diff(a: &BigRational, b: &BigRational) -> BigRational {
    (a - b).abs()
}
