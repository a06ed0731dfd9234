//! Interval hitting probabilities via edge down-crossing counts.
//!
//! Run the walk from `start` until it first reaches `right`. Reading the
//! cookie stack of site s in eating order, the walk departs s upward once
//! per down-crossing of the edge (s, s+1) plus once if s lies at or above
//! the start, and the number of down-departures from s equals the zeros
//! seen before the final one. Stacks at distinct sites are independent, so
//! the down-crossing counts form a Markov chain site by site from `right`
//! leftward, and `{T_right < T_left}` is exactly the event that the edge
//! (left, left+1) is never down-crossed.
//!
//! This computes the same quantity as the capped-chain solve but its cost is
//! linear in the interval width, so it reaches intervals whose product state
//! space is astronomically over budget.

use crate::env::EnvironmentView;

use super::ExactError;

/// Truncation controls for the down-crossing distribution.
#[derive(Debug, Clone, Copy)]
pub struct DowncrossOpts {
    /// Cap on the tracked number of down-crossings per edge; `None` sizes it
    /// from the interval width (down-crossing counts of a near-symmetric
    /// interval scale with its width).
    pub initial_cap: Option<usize>,
    /// Hard ceiling for the adaptive cap doubling.
    pub max_cap: usize,
    /// Acceptable probability mass lost to truncation. The result
    /// understates the true probability by at most this much.
    pub tail_tol: f64,
}

impl Default for DowncrossOpts {
    fn default() -> Self {
        Self { initial_cap: None, max_cap: 1 << 15, tail_tol: 1e-12 }
    }
}

/// P[T_right < T_left] from `start`, exact up to a truncation loss that is
/// tracked and kept below `opts.tail_tol` (the loss can only understate the
/// result).
pub fn interval_hitting_prob(
    view: &EnvironmentView,
    left: i64,
    start: i64,
    right: i64,
    opts: DowncrossOpts,
) -> Result<f64, ExactError> {
    let (q, lost) = interval_hitting_prob_with_loss(view, left, start, right, opts)?;
    if lost > opts.tail_tol {
        return Err(ExactError::TailNotBounded { lost, tol: opts.tail_tol, cap: opts.max_cap });
    }
    Ok(q)
}

/// Best-effort variant: doubles the cap until the truncation loss drops
/// below tolerance or the ceiling is hit, then reports the loss instead of
/// failing. The true probability lies in [q, q + lost].
pub fn interval_hitting_prob_with_loss(
    view: &EnvironmentView,
    left: i64,
    start: i64,
    right: i64,
    opts: DowncrossOpts,
) -> Result<(f64, f64), ExactError> {
    if left >= right || start < left || start > right {
        return Err(ExactError::BadInterval { left, start, right });
    }
    if start == right {
        return Ok((1.0, 0.0));
    }
    if start == left {
        return Ok((0.0, 0.0));
    }
    let width = (right - left - 1) as usize;
    let mut cap = opts
        .initial_cap
        .unwrap_or_else(|| (4 * width + 256).min(8192))
        .max(64);
    loop {
        let last_try = cap >= opts.max_cap;
        let (q, lost) = sweep(view, left, start, right, cap, opts.tail_tol, !last_try);
        if lost <= opts.tail_tol || last_try {
            return Ok((q, lost));
        }
        cap *= 2;
    }
}

/// Distribution over down-crossing counts with tracked support.
struct MassVec {
    v: Vec<f64>,
    /// Entries above `hi` are zero.
    hi: usize,
}

impl MassVec {
    fn zeros(cap: usize) -> Self {
        Self { v: vec![0.0; cap + 1], hi: 0 }
    }

    fn reset(&mut self) {
        self.v[..=self.hi].iter_mut().for_each(|x| *x = 0.0);
        self.hi = 0;
    }

    fn add(&mut self, idx: usize, w: f64) {
        self.v[idx] += w;
        self.hi = self.hi.max(idx);
    }

    /// Convolve with Geom(1/2) in place: y(n) = (x(n) + y(n-1)) / 2. The
    /// dropped mass past the buffer end is exactly the geometric
    /// continuation of the last value; it and the trimmed sub-`trim_eps`
    /// trailing entries are booked as lost.
    fn smooth(&mut self, trim_eps: f64, lost: &mut f64) {
        let cap = self.v.len() - 1;
        let new_hi = (self.hi + 64).min(cap);
        let mut prev = 0.0;
        for x in &mut self.v[..=new_hi] {
            let y = 0.5 * (*x + prev);
            *x = y;
            prev = y;
        }
        *lost += prev;
        self.hi = new_hi;
        while self.hi > 0 && self.v[self.hi] < trim_eps {
            *lost += self.v[self.hi];
            self.v[self.hi] = 0.0;
            self.hi -= 1;
        }
    }
}

/// Weights over the number of ones after reading a whole row with no early
/// stop.
fn full_prefix_weights(strengths: &[f64]) -> Vec<f64> {
    let mut dp = vec![0.0f64; strengths.len() + 1];
    dp[0] = 1.0;
    for (i, &p) in strengths.iter().enumerate() {
        for a in (0..=i).rev() {
            let w = dp[a];
            if w == 0.0 {
                continue;
            }
            dp[a + 1] += w * p;
            dp[a] = w * (1.0 - p);
        }
    }
    dp
}

/// One pass at a fixed cap; `Err(lost)` reports unacceptable truncation.
///
/// The per-site kernel maps the law of D_s to the law of D_{s-1}: read the
/// site's cookies until `D_s + [s >= start]` ones appear and count the
/// zeros. Small required-one counts are expanded directly; beyond the row
/// length the remaining ones each contribute an independent Geom(1/2) zero
/// count, so the whole tail of the distribution is handled with repeated
/// geometric smoothing passes (a Horner scheme over `G^{*d}`), which keeps
/// every operation a convex combination and every truncation accounted in
/// `lost` — the returned probability understates the truth by at most
/// `lost`.
fn sweep(
    view: &EnvironmentView,
    left: i64,
    start: i64,
    right: i64,
    cap: usize,
    tail_tol: f64,
    abort_over_tol: bool,
) -> (f64, f64) {
    let trim_eps = tail_tol / 2f64.powi(32);

    // dist = law of D_s; starts at the edge (right-1, right), never
    // down-crossed.
    let mut dist = MassVec::zeros(cap);
    dist.add(0, 1.0);
    let mut out = MassVec::zeros(cap);
    let mut horner = MassVec::zeros(cap);
    let mut lost = 0.0f64;

    for s in ((left + 1)..right).rev() {
        let row = view.residual_row(s);
        let strengths = row.strengths();
        let len = strengths.len();
        let extra = u64::from(s >= start);
        // Smallest d whose required count d + extra exceeds the row.
        let d0 = len + 1 - extra as usize;
        out.reset();

        // Exact expansion for requirements that can end inside the row.
        let top = dist.hi;
        for d in 0..d0.min(top + 1) {
            let w = dist.v[d];
            if w == 0.0 {
                continue;
            }
            let need = d as u64 + extra;
            if need == 0 {
                // Site never departed: no zeros.
                out.add(0, w);
                continue;
            }
            expand_small(strengths, need, w, cap, &mut out, trim_eps, &mut lost);
        }

        // Geometric-tail regime: T = sum_{d >= d0} dist[d] G^{*(d-d0)} by
        // Horner, then one extra smoothing per remaining one.
        if top >= d0 {
            horner.reset();
            for d in (d0..=top).rev() {
                horner.smooth(trim_eps, &mut lost);
                if dist.v[d] > 0.0 {
                    horner.add(0, dist.v[d]);
                }
            }
            let wt_full = full_prefix_weights(strengths);
            // After the full row, a ones leave d0 + extra - a = len + 1 - a
            // geometric draws and len - a zeros already on the board.
            for a in (0..=len).rev() {
                horner.smooth(trim_eps, &mut lost);
                let wt = wt_full[a];
                if wt == 0.0 {
                    continue;
                }
                let shift = len - a;
                for n in 0..=horner.hi.min(cap - shift) {
                    if horner.v[n] > 0.0 {
                        out.add(n + shift, wt * horner.v[n]);
                    }
                }
                if horner.hi > cap - shift {
                    let spilled: f64 = horner.v[cap - shift + 1..=horner.hi].iter().sum();
                    lost += wt * spilled;
                }
            }
        }
        std::mem::swap(&mut dist, &mut out);
        if abort_over_tol && lost > tail_tol {
            return (f64::NAN, lost);
        }
    }
    (dist.v[0], lost)
}

/// Read the row's cookies until `need` ones appear (need <= row length + 1),
/// counting zeros; the post-row remainder is a small negative binomial.
fn expand_small(
    strengths: &[f64],
    need: u64,
    w: f64,
    cap: usize,
    out: &mut MassVec,
    trim_eps: f64,
    lost: &mut f64,
) {
    let len = strengths.len();
    // dp over (ones a, zeros b) pairs still short of `need` ones.
    let mut dp = vec![vec![0.0f64; len + 2]; len + 2];
    let mut dp_next = vec![vec![0.0f64; len + 2]; len + 2];
    dp[0][0] = 1.0;
    for (i, &p) in strengths.iter().enumerate() {
        for r in dp_next.iter_mut() {
            r.iter_mut().for_each(|v| *v = 0.0);
        }
        for a in 0..=i {
            let b = i - a;
            let wt = dp[a][b];
            if wt == 0.0 {
                continue;
            }
            if (a as u64 + 1) == need {
                out.add(b, w * wt * p);
            } else {
                dp_next[a + 1][b] += wt * p;
            }
            dp_next[a][b + 1] += wt * (1.0 - p);
        }
        std::mem::swap(&mut dp, &mut dp_next);
    }
    for a in 0..=len {
        let b = len - a;
        let wt = dp[a][b];
        if wt == 0.0 {
            continue;
        }
        let branch = w * wt;
        let r = need - a as u64; // >= 1, and <= len + 1 so 2^-r is benign
        let mut nb = 0.5f64.powi(r as i32);
        let mut g = 0usize;
        loop {
            out.add(b + g, branch * nb);
            let next_nb = nb * 0.5 * (r as f64 + g as f64) / (g as f64 + 1.0);
            let ratio = 0.5 * (r as f64 + g as f64 + 1.0) / (g as f64 + 2.0);
            if ratio < 1.0 {
                let tail_bound = branch * next_nb / (1.0 - ratio);
                if tail_bound < trim_eps {
                    *lost += tail_bound;
                    break;
                }
            }
            if b + g == cap {
                *lost += if ratio < 1.0 { branch * next_nb / (1.0 - ratio) } else { branch };
                break;
            }
            nb = next_nb;
            g += 1;
        }
    }
}

/// One exact escape bound: `strength(0,1) * P[T_level < T_0 from 1]` on the
/// view left over after the first step.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct EscapeBound {
    pub level: i64,
    pub bound: f64,
}

/// Non-increasing sequence of exact upper bounds on the never-return
/// probability P[for all n > 0: X_n > 0]; the limit over levels is the
/// probability itself.
pub fn escape_prob_upper_bounds(
    view: &EnvironmentView,
    levels: &[i64],
) -> Result<Vec<EscapeBound>, ExactError> {
    let after_first_step = view.after_path(&[0, 1])?;
    let first = view.strength(0, 1);
    let mut bounds = Vec::with_capacity(levels.len());
    for &level in levels {
        if level < 1 {
            return Err(ExactError::BadInterval { left: 0, start: 1, right: level });
        }
        let q = interval_hitting_prob(&after_first_step, 0, 1, level, DowncrossOpts::default())?;
        bounds.push(EscapeBound { level, bound: first * q });
    }
    Ok(bounds)
}

/// Convergent estimate of P[walker from `start` ever reaches `barrier`],
/// formed as the monotone limit of 1 - P[T_M < T_barrier] over a doubling
/// ladder of right anchors M. The reported value is a lower bound on the
/// revisit probability that has stopped moving: `slack` is the change over
/// the last anchor doubling, below `tol` when the ladder converged.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct RevisitBound {
    pub value: f64,
    pub slack: f64,
    pub anchor: i64,
}

pub fn revisit_prob_estimate(
    view: &EnvironmentView,
    barrier: i64,
    start: i64,
    tol: f64,
) -> Result<RevisitBound, ExactError> {
    if start <= barrier {
        return Err(ExactError::BadInterval { left: barrier, start, right: start });
    }
    let opts = DowncrossOpts {
        initial_cap: Some(256),
        max_cap: 1 << 13,
        tail_tol: (tol * 0.1).min(1e-9),
    };
    // Truncation loss understates the hitting probability, i.e. overstates
    // the revisit bound: a safe direction, folded into the slack.
    let span = start - barrier;
    let mut anchor = start + span.max(16);
    let (q0, lost0) = interval_hitting_prob_with_loss(view, barrier, start, anchor, opts)?;
    let mut prev = 1.0 - q0;
    let mut max_lost = lost0;
    loop {
        let next_anchor = barrier + (anchor - barrier) * 2;
        let (q, lost) = interval_hitting_prob_with_loss(view, barrier, start, next_anchor, opts)?;
        let cur = 1.0 - q;
        max_lost = max_lost.max(lost);
        let slack = (cur - prev).abs() + max_lost;
        anchor = next_anchor;
        if slack < tol || anchor - barrier > (span.max(16)) << 8 {
            return Ok(RevisitBound { value: cur, slack, anchor });
        }
        prev = cur;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{CookieRow, EnvironmentSpec};
    use std::collections::BTreeMap;

    #[test]
    fn symmetric_interval_matches_gamblers_ruin() {
        let view = EnvironmentSpec::homogeneous(&[], 0).unwrap().build().unwrap();
        for (left, start, right) in [(0i64, 1i64, 2i64), (0, 1, 3), (0, 3, 10), (-4, -1, 5)] {
            let q = interval_hitting_prob(&view, left, start, right, DowncrossOpts::default())
                .unwrap();
            let expect = (start - left) as f64 / (right - left) as f64;
            assert!((q - expect).abs() < 1e-12, "{left}/{start}/{right}: {q} vs {expect}");
        }
    }

    #[test]
    fn worst_case_left_interval_reproduces_the_recursion() {
        // Mirror of the capped-chain check, through the independent route:
        // P[T_{-k} < T_0] from -1 equals 1/((k-1)k).
        let mut window = BTreeMap::new();
        window.insert(-1, CookieRow::empty());
        let view = EnvironmentSpec::ExplicitWindow {
            window,
            default: CookieRow::new(vec![1.0]).unwrap(),
            env_seed: 0,
        }
        .build()
        .unwrap();
        for k in 2i64..=6 {
            let q = interval_hitting_prob(&view, -k, -1, 0, DowncrossOpts::default()).unwrap();
            let expect = 1.0 - 1.0 / ((k - 1) * k) as f64;
            assert!((q - expect).abs() < 1e-12, "k={k}: {q}");
        }
    }

    #[test]
    fn boundary_starts_are_deterministic() {
        let view = EnvironmentSpec::two_cookie(0.9, 0).unwrap().build().unwrap();
        assert_eq!(
            interval_hitting_prob(&view, 0, 5, 5, DowncrossOpts::default()).unwrap(),
            1.0
        );
        assert_eq!(
            interval_hitting_prob(&view, 0, 0, 5, DowncrossOpts::default()).unwrap(),
            0.0
        );
    }

    #[test]
    fn forced_right_rows_escape_certainly() {
        let view = EnvironmentSpec::homogeneous(&[1.0, 1.0], 0).unwrap().build().unwrap();
        let bounds = escape_prob_upper_bounds(&view, &[2, 8, 32]).unwrap();
        for b in bounds {
            assert_eq!(b.bound, 1.0);
        }
    }

    #[test]
    fn symmetric_escape_bounds_decay_to_zero() {
        let view = EnvironmentSpec::homogeneous(&[], 0).unwrap().build().unwrap();
        let bounds = escape_prob_upper_bounds(&view, &[2, 4, 8, 16, 64, 128]).unwrap();
        // 0.5 * 1/K, decreasing toward the recurrent limit 0.
        for w in bounds.windows(2) {
            assert!(w[1].bound <= w[0].bound + 1e-12);
        }
        let last = bounds.last().unwrap();
        assert!((last.bound - 0.5 / 128.0).abs() < 1e-11);
    }

    #[test]
    fn two_cookie_bounds_decrease_toward_formula_value() {
        let view = EnvironmentSpec::two_cookie(0.9, 0).unwrap().build().unwrap();
        let levels: Vec<i64> = (1..=6).map(|e| 1 << e).collect();
        let bounds = escape_prob_upper_bounds(&view, &levels).unwrap();
        for w in bounds.windows(2) {
            assert!(w[1].bound <= w[0].bound + 1e-12);
        }
        let b64 = bounds.last().unwrap().bound;
        // Limit is (4p-3)/(2p-1) = 0.75 at p = 0.9; the K = 64 bound sits
        // slightly above it.
        assert!(b64 > 0.75 && b64 < 0.78, "bound at 64: {b64}");
    }

    #[test]
    fn revisit_estimate_converges_on_transient_views() {
        let view = EnvironmentSpec::two_cookie(0.9, 0).unwrap().build().unwrap();
        let b = revisit_prob_estimate(&view, 0, 40, 1e-8).unwrap();
        assert!(b.value > 0.0 && b.value < 1e-3, "revisit bound {}", b.value);
        assert!(b.slack.abs() < 1e-8);
    }
}
