//! Type-II fuzzy entropy over a gray-level histogram.
//!
//! A candidate segmentation into `LV + 1` levels is described by breakpoint
//! pairs `(a_1, c_1, ..., a_LV, c_LV)`. Each level `k` has a trapezoidal
//! membership over gray values, bounded above and below by hedge powers
//! `mu^(1/alpha)` and `mu^alpha`. The band between the bounds, weighted by the
//! histogram, gives the level's ultra-fuzziness `P_k`; the Shannon entropy of
//! the normalized band distribution gives the level entropy `H_k`; the sum of
//! all `H_k` is the objective the optimizers maximize. Thresholds are the
//! breakpoint-pair midpoints, rounded half up.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imageio::Histogram;

/// Linguistic-hedge exponent building the upper/lower membership bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HedgeConfig {
    alpha: f64,
}

impl HedgeConfig {
    /// `alpha` must exceed 1 or the two bounds coincide or invert.
    pub fn new(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() || alpha <= 1.0 {
            return Err(Error::InvalidParams(format!(
                "hedge exponent must be finite and > 1, got {alpha}"
            )));
        }
        Ok(Self { alpha })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

impl Default for HedgeConfig {
    fn default() -> Self {
        Self { alpha: 2.0 }
    }
}

/// Canonical membership breakpoints `(a_1, c_1, ..., a_LV, c_LV)`.
///
/// Construction sorts the raw vector ascending and clamps it into
/// `[0, L - 1]`, so any optimizer position is a valid candidate. The implicit
/// boundary pairs `a_0 = c_0 = 0` and `a_(LV+1) = c_(LV+1) = L - 1` are
/// applied during evaluation, never stored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FuzzyParams {
    values: Vec<f64>,
    levels: u32,
}

impl FuzzyParams {
    pub fn from_raw(raw: &[f64], levels: u32) -> Result<Self> {
        if raw.is_empty() || !raw.len().is_multiple_of(2) {
            return Err(Error::InvalidParams(format!(
                "parameter vector length must be a positive multiple of 2, got {}",
                raw.len()
            )));
        }
        if levels < 2 {
            return Err(Error::InvalidParams(format!(
                "levels must be >= 2, got {levels}"
            )));
        }
        if raw.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParams("non-finite parameter value".into()));
        }
        let top = f64::from(levels - 1);
        let mut values: Vec<f64> = raw.iter().map(|v| v.clamp(0.0, top)).collect();
        values.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
        Ok(Self { values, levels })
    }

    /// Number of thresholds (LV).
    pub fn lv(&self) -> usize {
        self.values.len() / 2
    }

    pub fn levels(&self) -> u32 {
        self.levels
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// The pair `(a_n, c_n)` for `n` in `1..=LV`, including the virtual
    /// boundary pairs at `n = 0` and `n = LV + 1`.
    fn pair(&self, n: usize) -> (f64, f64) {
        if n == 0 {
            (0.0, 0.0)
        } else if n == self.lv() + 1 {
            let top = f64::from(self.levels - 1);
            (top, top)
        } else {
            (self.values[2 * (n - 1)], self.values[2 * n - 1])
        }
    }
}

/// Strictly increasing integer thresholds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThresholdSet {
    thresholds: Vec<u32>,
}

impl ThresholdSet {
    pub fn new(thresholds: Vec<u32>) -> Result<Self> {
        if thresholds.is_empty() {
            return Err(Error::NonIncreasingThresholds(thresholds));
        }
        if thresholds.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::NonIncreasingThresholds(thresholds));
        }
        Ok(Self { thresholds })
    }

    pub fn len(&self) -> usize {
        self.thresholds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.thresholds.is_empty()
    }

    pub fn values(&self) -> &[u32] {
        &self.thresholds
    }
}

/// Trapezoidal membership of gray value `i` in level `k` (`1..=LV+1`).
///
/// Zero up to `a_(k-1)`, rising over `(a_(k-1), c_(k-1)]`, one over
/// `(c_(k-1), a_k]`, falling over `(a_k, c_k]`, zero beyond. Degenerate ramps
/// (`a = c`) evaluate as steps, the pointwise limit of the formula.
///
/// Panics if `k` is outside `1..=LV+1`.
pub fn membership(params: &FuzzyParams, k: usize, i: f64) -> f64 {
    assert!(
        (1..=params.lv() + 1).contains(&k),
        "level index {k} outside 1..={}",
        params.lv() + 1
    );
    let (a_prev, c_prev) = params.pair(k - 1);
    let (a_k, c_k) = params.pair(k);
    if i <= a_prev {
        0.0
    } else if i <= c_prev {
        (i - a_prev) / (c_prev - a_prev)
    } else if i <= a_k {
        1.0
    } else if i <= c_k {
        (c_k - i) / (c_k - a_k)
    } else {
        0.0
    }
}

/// Upper and lower hedge bounds `(mu^(1/alpha), mu^alpha)` of a membership value.
pub fn bound_memberships(mu: f64, hedge: &HedgeConfig) -> (f64, f64) {
    debug_assert!((0.0..=1.0).contains(&mu));
    (mu.powf(1.0 / hedge.alpha), mu.powf(hedge.alpha))
}

/// Ultra-fuzziness `P_k`: histogram-weighted width of the band between the
/// upper and lower membership bounds for level `k`.
pub fn ultra_fuzziness(hist: &Histogram, params: &FuzzyParams, k: usize, hedge: &HedgeConfig) -> f64 {
    band_iter(hist, params, k, hedge).sum()
}

fn band_iter<'a>(
    hist: &'a Histogram,
    params: &'a FuzzyParams,
    k: usize,
    hedge: &'a HedgeConfig,
) -> impl Iterator<Item = f64> + 'a {
    hist.bins().iter().enumerate().map(move |(i, &h)| {
        let mu = membership(params, k, i as f64);
        let (high, low) = bound_memberships(mu, hedge);
        h * (high - low)
    })
}

/// Type-II fuzzy entropy of level `k`: Shannon entropy of the band
/// distribution normalized by `P_k`. Empty levels (`P_k = 0`) contribute 0.
pub fn level_entropy(hist: &Histogram, params: &FuzzyParams, k: usize, hedge: &HedgeConfig) -> f64 {
    let p_k = ultra_fuzziness(hist, params, k, hedge);
    if p_k <= 0.0 {
        return 0.0;
    }
    band_iter(hist, params, k, hedge)
        .map(|w| {
            let q = w / p_k;
            if q > 0.0 {
                -q * q.ln()
            } else {
                0.0
            }
        })
        .sum()
}

/// Total entropy: the sum of `level_entropy` over all `LV + 1` levels.
/// This is the fitness every optimizer maximizes.
pub fn total_entropy(hist: &Histogram, params: &FuzzyParams, hedge: &HedgeConfig) -> f64 {
    (1..=params.lv() + 1)
        .map(|k| level_entropy(hist, params, k, hedge))
        .sum()
}

fn round_half_up(x: f64) -> u32 {
    debug_assert!(x >= 0.0);
    x.round() as u32
}

/// Thresholds from breakpoint pairs: `T_n = round((a_n + c_n) / 2)` (half up).
///
/// Collapsed thresholds signal degenerate parameters; callers treat such
/// candidates as invalid.
pub fn thresholds_from_params(params: &FuzzyParams) -> Result<ThresholdSet> {
    let thresholds: Vec<u32> = (1..=params.lv())
        .map(|n| {
            let (a, c) = params.pair(n);
            round_half_up(0.5 * (a + c))
        })
        .collect();
    if thresholds.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::CollapsedThresholds(thresholds));
    }
    ThresholdSet::new(thresholds)
}

/// The maximization objective handed to optimizers: total entropy of the
/// canonicalized candidate, or `-inf` when its thresholds collapse.
#[derive(Debug, Clone)]
pub struct EntropyObjective<'a> {
    hist: &'a Histogram,
    hedge: HedgeConfig,
}

impl<'a> EntropyObjective<'a> {
    pub fn new(hist: &'a Histogram, hedge: HedgeConfig) -> Self {
        Self { hist, hedge }
    }

    pub fn hedge(&self) -> &HedgeConfig {
        &self.hedge
    }

    /// Fitness of a raw optimizer position (length `2 * LV`).
    pub fn fitness(&self, raw: &[f64]) -> f64 {
        let params = FuzzyParams::from_raw(raw, self.hist.levels())
            .expect("optimizer positions have even positive length");
        if thresholds_from_params(&params).is_err() {
            return f64::NEG_INFINITY;
        }
        total_entropy(self.hist, &params, &self.hedge)
    }
}
