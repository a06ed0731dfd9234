//! Cookie environments: per-site stacks of jump-right probabilities.
//!
//! A site's row lists the strengths of its cookies in eating order; every
//! index past the end of the row has the neutral strength 1/2. Specs describe
//! the law of the environment (homogeneous, i.i.d. mixture, periodic,
//! explicit window); views are deterministic realizations that also carry
//! the per-site count of cookies already removed, so the leftover transform
//! is just an index offset.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Strength of every cookie past the end of a row.
pub const TAIL_STRENGTH: f64 = 0.5;

/// Tolerance for mixture weights summing to one.
const WEIGHT_SUM_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EnvError {
    #[error("cookie strength {value} at index {index} outside [0.5, 1]")]
    StrengthOutOfRange { index: usize, value: f64 },
    #[error("{kind} expects {expected} row(s), got {got}")]
    RowCount {
        kind: &'static str,
        expected: &'static str,
        got: usize,
    },
    #[error("weights must match rows: {rows} rows vs {weights} weights")]
    WeightCount { rows: usize, weights: usize },
    #[error("weight {value} at index {index} is negative")]
    NegativeWeight { index: usize, value: f64 },
    #[error("weights sum to {sum}, expected 1 within 1e-12")]
    WeightSum { sum: f64 },
    #[error("site marginal not stationary; use random phase for classification")]
    NotStationary,
    #[error("path is not nearest-neighbor at step {step}: {from} -> {to}")]
    NotNearestNeighbor { step: usize, from: i64, to: i64 },
}

/// Finite ordered list of cookie strengths at one site; indices beyond the
/// list have strength exactly [`TAIL_STRENGTH`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct CookieRow {
    strengths: Vec<f64>,
}

impl CookieRow {
    pub fn new(strengths: Vec<f64>) -> Result<Self, EnvError> {
        for (i, &s) in strengths.iter().enumerate() {
            if !(0.5..=1.0).contains(&s) {
                return Err(EnvError::StrengthOutOfRange { index: i + 1, value: s });
            }
        }
        Ok(Self { strengths })
    }

    /// Row with no cookies: every visit is an unbiased coin.
    pub fn empty() -> Self {
        Self { strengths: Vec::new() }
    }

    /// Strength of the `index`-th cookie, 1-based; the implicit tail is 1/2.
    pub fn strength_at_index(&self, index: u32) -> f64 {
        debug_assert!(index >= 1, "cookie indices are 1-based");
        self.strengths
            .get(index as usize - 1)
            .copied()
            .unwrap_or(TAIL_STRENGTH)
    }

    /// Total drift stored in the row: sum of 2s-1 over listed cookies.
    pub fn drift(&self) -> f64 {
        self.strengths.iter().map(|s| 2.0 * s - 1.0).sum()
    }

    /// Drift left after the first `consumed` cookies have been removed.
    pub fn residual_drift(&self, consumed: u32) -> f64 {
        self.strengths
            .iter()
            .skip(consumed as usize)
            .map(|s| 2.0 * s - 1.0)
            .sum()
    }

    /// Row left after removing the bottom `consumed` cookies.
    pub fn residual(&self, consumed: u32) -> CookieRow {
        CookieRow {
            strengths: self.strengths.iter().skip(consumed as usize).copied().collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.strengths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strengths.is_empty()
    }

    pub fn strengths(&self) -> &[f64] {
        &self.strengths
    }

    /// Pointwise comparison in the canonical partial order on environments,
    /// tails included.
    pub fn dominated_by(&self, other: &CookieRow) -> bool {
        let n = self.len().max(other.len()) as u32;
        (1..=n).all(|i| self.strength_at_index(i) <= other.strength_at_index(i))
    }
}

impl TryFrom<Vec<f64>> for CookieRow {
    type Error = EnvError;
    fn try_from(v: Vec<f64>) -> Result<Self, EnvError> {
        CookieRow::new(v)
    }
}

impl From<CookieRow> for Vec<f64> {
    fn from(r: CookieRow) -> Vec<f64> {
        r.strengths
    }
}

/// Phase selection for periodic environments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhasePolicy {
    /// Phase drawn once from the environment seed; makes the site marginal
    /// uniform over the period.
    Random,
    /// Row index used at site 0.
    Fixed(u32),
}

/// Declarative law of a cookie environment.
///
/// Serializes to the JSON schema
/// `{"kind":"homogeneous","rows":[[0.9,0.9]],"env_seed":42}`; mixtures add
/// `"weights"`, periodic adds `"phase"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EnvironmentSpec {
    Homogeneous {
        rows: Vec<CookieRow>,
        env_seed: u64,
    },
    IidMixture {
        rows: Vec<CookieRow>,
        weights: Vec<f64>,
        env_seed: u64,
    },
    Periodic {
        rows: Vec<CookieRow>,
        phase: PhasePolicy,
        env_seed: u64,
    },
    ExplicitWindow {
        window: BTreeMap<i64, CookieRow>,
        default: CookieRow,
        env_seed: u64,
    },
}

impl EnvironmentSpec {
    /// Homogeneous environment with the same row at every site.
    pub fn homogeneous(strengths: &[f64], env_seed: u64) -> Result<Self, EnvError> {
        Ok(Self::Homogeneous {
            rows: vec![CookieRow::new(strengths.to_vec())?],
            env_seed,
        })
    }

    /// The two-cookie environment (p, p) at every integer.
    pub fn two_cookie(p: f64, env_seed: u64) -> Result<Self, EnvError> {
        Self::homogeneous(&[p, p], env_seed)
    }

    pub fn env_seed(&self) -> u64 {
        match self {
            Self::Homogeneous { env_seed, .. }
            | Self::IidMixture { env_seed, .. }
            | Self::Periodic { env_seed, .. }
            | Self::ExplicitWindow { env_seed, .. } => *env_seed,
        }
    }

    /// Same law, different realization seed.
    pub fn with_env_seed(&self, env_seed: u64) -> Self {
        let mut spec = self.clone();
        match &mut spec {
            Self::Homogeneous { env_seed: s, .. }
            | Self::IidMixture { env_seed: s, .. }
            | Self::Periodic { env_seed: s, .. }
            | Self::ExplicitWindow { env_seed: s, .. } => *s = env_seed,
        }
        spec
    }

    pub fn validate(&self) -> Result<(), EnvError> {
        match self {
            Self::Homogeneous { rows, .. } => {
                if rows.len() != 1 {
                    return Err(EnvError::RowCount {
                        kind: "homogeneous",
                        expected: "exactly 1",
                        got: rows.len(),
                    });
                }
            }
            Self::IidMixture { rows, weights, .. } => {
                if rows.is_empty() {
                    return Err(EnvError::RowCount {
                        kind: "iid_mixture",
                        expected: "at least 1",
                        got: 0,
                    });
                }
                if rows.len() != weights.len() {
                    return Err(EnvError::WeightCount {
                        rows: rows.len(),
                        weights: weights.len(),
                    });
                }
                for (i, &w) in weights.iter().enumerate() {
                    if w < 0.0 {
                        return Err(EnvError::NegativeWeight { index: i, value: w });
                    }
                }
                let sum: f64 = weights.iter().sum();
                if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
                    return Err(EnvError::WeightSum { sum });
                }
            }
            Self::Periodic { rows, .. } => {
                if rows.len() < 2 {
                    return Err(EnvError::RowCount {
                        kind: "periodic",
                        expected: "at least 2",
                        got: rows.len(),
                    });
                }
            }
            Self::ExplicitWindow { .. } => {}
        }
        Ok(())
    }

    /// Realize the spec into a view with nothing consumed.
    ///
    /// Site rows are a pure function of `(env_seed, site)`: mixtures hash the
    /// site into the weight table, so realization is order-independent, and a
    /// random periodic phase is drawn once from the seed.
    pub fn build(&self) -> Result<EnvironmentView, EnvError> {
        self.validate()?;
        let phase = match self {
            Self::Periodic { rows, phase, .. } => match phase {
                PhasePolicy::Fixed(k) => k % rows.len() as u32,
                PhasePolicy::Random => {
                    (splitmix64(self.env_seed() ^ PHASE_SALT) % rows.len() as u64) as u32
                }
            },
            _ => 0,
        };
        Ok(EnvironmentView {
            spec: self.clone(),
            phase,
            offset: 0,
            consumed: HashMap::new(),
        })
    }

    /// Exact expectation of the per-site drift under the spec's site
    /// marginal. Only defined for stationary site marginals.
    pub fn expected_delta(&self) -> Result<f64, EnvError> {
        self.validate()?;
        match self {
            Self::Homogeneous { rows, .. } => Ok(rows[0].drift()),
            Self::IidMixture { rows, weights, .. } => Ok(rows
                .iter()
                .zip(weights)
                .map(|(r, w)| w * r.drift())
                .sum()),
            Self::Periodic { rows, phase, .. } => match phase {
                PhasePolicy::Random => {
                    Ok(rows.iter().map(CookieRow::drift).sum::<f64>() / rows.len() as f64)
                }
                PhasePolicy::Fixed(_) => Err(EnvError::NotStationary),
            },
            Self::ExplicitWindow { .. } => Err(EnvError::NotStationary),
        }
    }

    /// Expected drift of the first cookie under the site marginal; surrogate
    /// positivity check for walks that must make net rightward progress.
    pub fn expected_first_cookie_drift(&self) -> Result<f64, EnvError> {
        self.validate()?;
        let first = |r: &CookieRow| 2.0 * r.strength_at_index(1) - 1.0;
        match self {
            Self::Homogeneous { rows, .. } => Ok(first(&rows[0])),
            Self::IidMixture { rows, weights, .. } => {
                Ok(rows.iter().zip(weights).map(|(r, w)| w * first(r)).sum())
            }
            Self::Periodic { rows, phase, .. } => match phase {
                PhasePolicy::Random => {
                    Ok(rows.iter().map(first).sum::<f64>() / rows.len() as f64)
                }
                PhasePolicy::Fixed(_) => Err(EnvError::NotStationary),
            },
            Self::ExplicitWindow { .. } => Err(EnvError::NotStationary),
        }
    }

    /// Whether the law is almost surely the single-strength-1 row
    /// `(1, 1/2, 1/2, ...)`, the one case where the drift criterion fails.
    pub fn is_degenerate_forced_right(&self) -> bool {
        let degen = |r: &CookieRow| {
            !r.is_empty()
                && r.strength_at_index(1) == 1.0
                && r.strengths().iter().skip(1).all(|&s| s == TAIL_STRENGTH)
        };
        match self {
            Self::Homogeneous { rows, .. } => degen(&rows[0]),
            Self::IidMixture { rows, weights, .. } => rows
                .iter()
                .zip(weights)
                .filter(|(_, &w)| w > 0.0)
                .all(|(r, _)| degen(r)),
            Self::Periodic { rows, .. } => rows.iter().all(degen),
            Self::ExplicitWindow { window, default, .. } => {
                degen(default) && window.values().all(degen)
            }
        }
    }
}

const PHASE_SALT: u64 = 0x9e3779b97f4a7c15;
const SITE_SALT: u64 = 0xd1b54a32d192ed03;

/// SplitMix64 finalizer; the keyed hash behind lazy site realization.
pub(crate) fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Uniform in [0, 1) from 64 bits.
pub(crate) fn unit_from_bits(bits: u64) -> f64 {
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Deterministic realization of a spec plus the count of cookies already
/// removed per site. Value semantics: clone to get an independent snapshot.
#[derive(Debug, Clone)]
pub struct EnvironmentView {
    spec: EnvironmentSpec,
    phase: u32,
    /// Shift applied before realization: this view's site x is the base
    /// environment's site x + offset.
    offset: i64,
    consumed: HashMap<i64, u32>,
}

impl EnvironmentView {
    pub fn spec(&self) -> &EnvironmentSpec {
        &self.spec
    }

    fn base_row(&self, site: i64) -> &CookieRow {
        let site = site + self.offset;
        match &self.spec {
            EnvironmentSpec::Homogeneous { rows, .. } => &rows[0],
            EnvironmentSpec::IidMixture { rows, weights, env_seed } => {
                let h = splitmix64(*env_seed ^ splitmix64(site as u64 ^ SITE_SALT));
                let u = unit_from_bits(h);
                let mut acc = 0.0;
                for (row, w) in rows.iter().zip(weights) {
                    acc += w;
                    if u < acc {
                        return row;
                    }
                }
                rows.last().expect("validated nonempty")
            }
            EnvironmentSpec::Periodic { rows, .. } => {
                let m = rows.len() as i64;
                let idx = (site + self.phase as i64).rem_euclid(m) as usize;
                &rows[idx]
            }
            EnvironmentSpec::ExplicitWindow { window, default, .. } => {
                window.get(&site).unwrap_or(default)
            }
        }
    }

    /// Cookies already removed at `site`.
    pub fn consumed_at(&self, site: i64) -> u32 {
        self.consumed.get(&site).copied().unwrap_or(0)
    }

    /// Strength governing the `visit_index`-th visit to `site` (1-based),
    /// respecting consumed offsets and the 1/2 tail.
    #[inline]
    pub fn strength(&self, site: i64, visit_index: u32) -> f64 {
        debug_assert!(visit_index >= 1);
        let shift = if self.consumed.is_empty() {
            0
        } else {
            self.consumed_at(site)
        };
        self.base_row(site).strength_at_index(visit_index + shift)
    }

    /// Row still visible at `site` after consumption.
    pub fn residual_row(&self, site: i64) -> CookieRow {
        self.base_row(site).residual(self.consumed_at(site))
    }

    /// Drift still stored at `site`.
    pub fn residual_delta(&self, site: i64) -> f64 {
        self.base_row(site).residual_drift(self.consumed_at(site))
    }

    /// Drift of the full (unconsumed) row at `site`.
    pub fn base_delta(&self, site: i64) -> f64 {
        self.base_row(site).drift()
    }

    /// The leftover transform: remove one bottom cookie per visit along
    /// `path`, final site excluded. The original view is unchanged.
    pub fn after_path(&self, path: &[i64]) -> Result<EnvironmentView, EnvError> {
        for (step, w) in path.windows(2).enumerate() {
            if (w[1] - w[0]).abs() != 1 {
                return Err(EnvError::NotNearestNeighbor {
                    step,
                    from: w[0],
                    to: w[1],
                });
            }
        }
        let mut next = self.clone();
        if path.len() > 1 {
            for &x in &path[..path.len() - 1] {
                *next.consumed.entry(x).or_insert(0) += 1;
            }
        }
        Ok(next)
    }

    /// The canonical shift: site z of the result is site z + k of `self`.
    pub fn shifted(&self, k: i64) -> EnvironmentView {
        EnvironmentView {
            spec: self.spec.clone(),
            phase: self.phase,
            offset: self.offset + k,
            consumed: self
                .consumed
                .iter()
                .map(|(&site, &c)| (site - k, c))
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn row_rejects_out_of_range_strengths() {
        assert!(matches!(
            CookieRow::new(vec![0.4]),
            Err(EnvError::StrengthOutOfRange { index: 1, .. })
        ));
        assert!(CookieRow::new(vec![1.0 + 1e-9]).is_err());
        assert!(CookieRow::new(vec![0.5, 1.0]).is_ok());
    }

    #[test]
    fn symmetric_homogeneous_row_is_always_half() {
        let view = EnvironmentSpec::homogeneous(&[0.5], 1).unwrap().build().unwrap();
        for x in [-5i64, 0, 3] {
            for i in 1..4 {
                assert_eq!(view.strength(x, i), 0.5);
            }
        }
    }

    #[test]
    fn two_cookie_row_has_tail_half() {
        let view = EnvironmentSpec::two_cookie(0.9, 42).unwrap().build().unwrap();
        assert_eq!(view.strength(7, 1), 0.9);
        assert_eq!(view.strength(7, 2), 0.9);
        assert_eq!(view.strength(7, 3), 0.5);
    }

    #[test]
    fn empty_row_is_half_everywhere() {
        let view = EnvironmentSpec::homogeneous(&[], 1).unwrap().build().unwrap();
        for i in 1..5 {
            assert_eq!(view.strength(0, i), 0.5);
        }
    }

    #[test]
    fn mixture_realization_is_deterministic_and_order_independent() {
        let spec = EnvironmentSpec::IidMixture {
            rows: vec![CookieRow::new(vec![1.0, 1.0]).unwrap(), CookieRow::empty()],
            weights: vec![0.5, 0.5],
            env_seed: 7,
        };
        let a = spec.build().unwrap();
        let b = spec.build().unwrap();
        // Query b in the opposite order.
        let sites: Vec<i64> = (-20..20).collect();
        let fwd: Vec<f64> = sites.iter().map(|&x| a.strength(x, 1)).collect();
        let bwd: Vec<f64> = sites.iter().rev().map(|&x| b.strength(x, 1)).collect();
        let bwd_fwd: Vec<f64> = bwd.into_iter().rev().collect();
        assert_eq!(fwd, bwd_fwd);
        assert_eq!(a.strength(17, 1), b.strength(17, 1));
        // Both rows actually occur.
        assert!(fwd.iter().any(|&s| s == 1.0) && fwd.iter().any(|&s| s == 0.5));
    }

    #[test]
    fn drift_examples() {
        assert_eq!(CookieRow::new(vec![0.5, 0.5]).unwrap().drift(), 0.0);
        assert_eq!(CookieRow::new(vec![1.0, 1.0]).unwrap().drift(), 2.0);
        // 2 * (2*0.75 - 1) = 1.0
        assert!((CookieRow::new(vec![0.75, 0.75]).unwrap().drift() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn expected_delta_examples() {
        let spec = EnvironmentSpec::two_cookie(0.75, 0).unwrap();
        assert!((spec.expected_delta().unwrap() - 1.0).abs() < 1e-15);

        let mix = EnvironmentSpec::IidMixture {
            rows: vec![CookieRow::new(vec![1.0, 1.0]).unwrap(), CookieRow::empty()],
            weights: vec![0.5, 0.5],
            env_seed: 0,
        };
        assert!((mix.expected_delta().unwrap() - 1.0).abs() < 1e-15);

        let sym = EnvironmentSpec::homogeneous(&[0.5], 0).unwrap();
        assert_eq!(sym.expected_delta().unwrap(), 0.0);
    }

    #[test]
    fn expected_delta_rejects_fixed_phase_and_window() {
        let per = EnvironmentSpec::Periodic {
            rows: vec![
                CookieRow::new(vec![1.0, 1.0]).unwrap(),
                CookieRow::new(vec![0.6, 1.0]).unwrap(),
            ],
            phase: PhasePolicy::Fixed(0),
            env_seed: 0,
        };
        assert_eq!(per.expected_delta(), Err(EnvError::NotStationary));
        let win = EnvironmentSpec::ExplicitWindow {
            window: BTreeMap::new(),
            default: CookieRow::empty(),
            env_seed: 0,
        };
        assert_eq!(win.expected_delta(), Err(EnvError::NotStationary));
    }

    #[test]
    fn weights_must_sum_to_one() {
        let bad = EnvironmentSpec::IidMixture {
            rows: vec![CookieRow::empty(), CookieRow::empty()],
            weights: vec![0.5, 0.6],
            env_seed: 0,
        };
        assert!(matches!(bad.validate(), Err(EnvError::WeightSum { .. })));
    }

    #[test]
    fn leftover_removes_bottom_cookies_excluding_final_site() {
        let view = EnvironmentSpec::homogeneous(&[0.9, 0.8], 0).unwrap().build().unwrap();
        // Path (0, 1, 0): site 0 counted once (index 0), site 1 once (index 1),
        // final return to 0 not counted.
        let after = view.after_path(&[0, 1, 0]).unwrap();
        assert_eq!(after.strength(0, 1), 0.8);
        assert_eq!(after.strength(1, 1), 0.8);
        // Original untouched.
        assert_eq!(view.strength(0, 1), 0.9);
    }

    #[test]
    fn leftover_on_singleton_path_is_identity() {
        let view = EnvironmentSpec::two_cookie(0.9, 0).unwrap().build().unwrap();
        let after = view.after_path(&[0]).unwrap();
        assert_eq!(after.consumed_at(0), 0);
    }

    #[test]
    fn leftover_path_0_1_2() {
        let view = EnvironmentSpec::two_cookie(0.9, 0).unwrap().build().unwrap();
        let after = view.after_path(&[0, 1, 2]).unwrap();
        assert_eq!(after.consumed_at(0), 1);
        assert_eq!(after.consumed_at(1), 1);
        assert_eq!(after.consumed_at(2), 0);
        assert_eq!(after.strength(2, 1), 0.9);
        assert_eq!(after.strength(0, 1), 0.9); // second cookie now first
        assert_eq!(after.strength(0, 2), 0.5);
    }

    #[test]
    fn leftover_rejects_jumps() {
        let view = EnvironmentSpec::two_cookie(0.9, 0).unwrap().build().unwrap();
        assert!(matches!(
            view.after_path(&[0, 2]),
            Err(EnvError::NotNearestNeighbor { step: 0, .. })
        ));
    }

    #[test]
    fn leftover_composes_like_path_concatenation() {
        let view = EnvironmentSpec::IidMixture {
            rows: vec![CookieRow::new(vec![0.9, 0.7]).unwrap(), CookieRow::empty()],
            weights: vec![0.7, 0.3],
            env_seed: 3,
        }
        .build()
        .unwrap();
        let pi1 = [0i64, 1, 2, 1];
        let pi2 = [1i64, 0, -1, 0];
        let full = [0i64, 1, 2, 1, 0, -1, 0];
        let two_step = view.after_path(&pi1).unwrap().after_path(&pi2).unwrap();
        let one_step = view.after_path(&full).unwrap();
        for x in -3..4 {
            assert_eq!(two_step.consumed_at(x), one_step.consumed_at(x), "site {x}");
        }
    }

    #[test]
    fn shift_consistency() {
        let spec = EnvironmentSpec::IidMixture {
            rows: vec![CookieRow::new(vec![0.8]).unwrap(), CookieRow::empty()],
            weights: vec![0.4, 0.6],
            env_seed: 11,
        };
        let view = spec.build().unwrap();
        let shifted = view.shifted(5);
        for x in -10..10 {
            for i in 1..3 {
                assert_eq!(shifted.strength(x, i), view.strength(x + 5, i));
            }
        }
        // Consumed counters move with the shift.
        let eaten = view.after_path(&[5, 6, 5]).unwrap();
        let eaten_shifted = eaten.shifted(5);
        assert_eq!(eaten_shifted.consumed_at(0), 1);
        assert_eq!(eaten_shifted.strength(0, 1), eaten.strength(5, 2));
    }

    #[test]
    fn residual_delta_tracks_consumption() {
        let view = EnvironmentSpec::homogeneous(&[0.9, 0.8], 0).unwrap().build().unwrap();
        let total = view.residual_delta(0);
        let after = view.after_path(&[0, 1]).unwrap();
        let eaten = 2.0 * 0.9 - 1.0;
        assert!((after.residual_delta(0) - (total - eaten)).abs() < 1e-15);
        assert!(after.residual_delta(0) >= 0.0);
    }

    #[test]
    fn degenerate_detection() {
        assert!(EnvironmentSpec::homogeneous(&[1.0], 0).unwrap().is_degenerate_forced_right());
        assert!(EnvironmentSpec::homogeneous(&[1.0, 0.5], 0)
            .unwrap()
            .is_degenerate_forced_right());
        assert!(!EnvironmentSpec::homogeneous(&[1.0, 1.0], 0)
            .unwrap()
            .is_degenerate_forced_right());
        assert!(!EnvironmentSpec::homogeneous(&[0.9], 0).unwrap().is_degenerate_forced_right());
    }

    #[test]
    fn spec_json_round_trip_matches_schema() {
        let spec = EnvironmentSpec::two_cookie(0.9, 42).unwrap();
        let json = serde_json::to_value(&spec).unwrap();
        assert_eq!(
            json,
            serde_json::json!({"kind":"homogeneous","rows":[[0.9,0.9]],"env_seed":42})
        );
        let back: EnvironmentSpec = serde_json::from_value(json).unwrap();
        assert_eq!(back, spec);

        let per: EnvironmentSpec = serde_json::from_str(
            r#"{"kind":"periodic","rows":[[1.0,1.0],[0.6,1.0]],"phase":"random","env_seed":7}"#,
        )
        .unwrap();
        assert!(matches!(per, EnvironmentSpec::Periodic { .. }));

        let bad: Result<EnvironmentSpec, _> =
            serde_json::from_str(r#"{"kind":"homogeneous","rows":[[0.4]],"env_seed":1}"#);
        assert!(bad.is_err());
    }

    #[test]
    fn periodic_random_phase_is_seed_deterministic() {
        let spec = EnvironmentSpec::Periodic {
            rows: vec![
                CookieRow::new(vec![1.0, 1.0]).unwrap(),
                CookieRow::new(vec![0.6, 1.0]).unwrap(),
            ],
            phase: PhasePolicy::Random,
            env_seed: 5,
        };
        let a = spec.build().unwrap();
        let b = spec.build().unwrap();
        for x in -4..4 {
            assert_eq!(a.strength(x, 1), b.strength(x, 1));
        }
        // Some seed must give phase 1; check both phases occur across seeds.
        let phases: Vec<f64> = (0..8)
            .map(|s| spec.with_env_seed(s).build().unwrap().strength(0, 1))
            .collect();
        assert!(phases.iter().any(|&p| p == 1.0) && phases.iter().any(|&p| p == 0.6));
    }
}
