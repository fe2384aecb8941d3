//! Generational statistics of the deviation S(n) = H(n) − n/2.
//!
//! The deviation is a half-integer, so it is carried exactly as the integer
//! numerator 2·S(n) = 2·H(n) − n. The index range is partitioned into
//! "generations" (doubling windows by default), per-window variance M_t² is
//! accumulated in exact integer arithmetic with floating point entering only
//! at the final division, and the growth exponent α(t) = log₂(M_t / M_{t−1})
//! is reported per window pair.

use crate::eval::History;

/// One sample of the deviation: `twice_s` is the exact numerator of
/// 2·S(n), so S(n) = `twice_s`/2.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Deviation {
    pub n: u64,
    pub twice_s: i64,
}

impl Deviation {
    /// The deviation as a float; exact, since S(n) is a half-integer.
    pub fn s(self) -> f64 {
        self.twice_s as f64 / 2.0
    }
}

/// Why a statistics operation was refused.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StatsError {
    #[error("range [{n_min}, {n_max}] is outside the available terms 1..={len}")]
    RangeOutOfBounds { n_min: u64, n_max: u64, len: u64 },
    #[error("2*H({n}) - {n} does not fit in 64 bits")]
    DeviationOverflow { n: u64 },
    #[error("scheme start must be at least 1")]
    ZeroStart,
    #[error("generation scheme produces no windows")]
    EmptyScheme,
    #[error("boundaries must be strictly increasing")]
    BoundariesNotIncreasing,
    #[error("deviations must cover a contiguous index range")]
    NonContiguousDeviations,
    #[error("window ({lo}, {hi}] is outside the deviation range")]
    WindowOutOfRange { lo: u64, hi: u64 },
    #[error("moment accumulator overflowed in generation {t}")]
    AccumulatorOverflow { t: usize },
}

/// Extracts (n, 2·S(n)) for `n_min..=n_max` from a run's history.
///
/// # Examples
///
/// ```
/// use metafib::dsl::{parse, validate};
/// use metafib::eval::{compile, run, RunConfig};
/// use metafib::genstats::deviations;
///
/// // H_3: H(4) = 4 gives S = 2; H(7) = 3 gives S = -1/2.
/// let spec = validate(&parse("A(n)=A(n-A(n-2))+A(n-A(n-3)); init ceil(n/2); start 3").unwrap()).unwrap();
/// let (history, _) = run(&compile(&spec), spec.init(), &RunConfig::default());
/// let devs = deviations(&history, 4, 7).unwrap();
/// assert_eq!(devs[0].twice_s, 4);
/// assert_eq!(devs[3].twice_s, -1);
/// assert_eq!(devs[3].s(), -0.5);
/// ```
pub fn deviations(history: &History, n_min: u64, n_max: u64) -> Result<Vec<Deviation>, StatsError> {
    if n_min < 1 || n_min > n_max || n_max > history.len() {
        return Err(StatsError::RangeOutOfBounds {
            n_min,
            n_max,
            len: history.len(),
        });
    }
    (n_min..=n_max)
        .map(|n| {
            let h = history.term(n).expect("n is within the history");
            let twice_s = 2 * i128::from(h) - i128::from(n);
            Ok(Deviation {
                n,
                twice_s: i64::try_from(twice_s).map_err(|_| StatsError::DeviationOverflow { n })?,
            })
        })
        .collect()
}

/// How to partition an index range into generations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GenerationScheme {
    /// Ratio-2 windows `(n0·2^{t−1}, n0·2^t]` over `(n0, n_max]`; the last
    /// window is truncated at `n_max` when it falls short of a full
    /// doubling.
    Geometric { n0: u64, n_max: u64 },
    /// Consecutive boundaries `b`, giving windows `(b[t−1], b[t]]`.
    Explicit { boundaries: Vec<u64> },
}

/// A generation: the half-open index window `(lo, hi]`, 1-based `t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Window {
    pub t: usize,
    pub lo: u64,
    pub hi: u64,
    /// True when a geometric window was clipped by the range limit.
    pub truncated: bool,
}

impl GenerationScheme {
    /// Materializes the generation windows. They tile `(n_min, n_max]`
    /// with no gaps or overlaps.
    ///
    /// # Examples
    ///
    /// ```
    /// use metafib::genstats::GenerationScheme;
    ///
    /// let windows = GenerationScheme::Geometric { n0: 1000, n_max: 4000 }
    ///     .segment()
    ///     .unwrap();
    /// let spans: Vec<(u64, u64)> = windows.iter().map(|w| (w.lo, w.hi)).collect();
    /// assert_eq!(spans, [(1000, 2000), (2000, 4000)]);
    /// ```
    pub fn segment(&self) -> Result<Vec<Window>, StatsError> {
        match self {
            GenerationScheme::Geometric { n0, n_max } => {
                if *n0 < 1 {
                    return Err(StatsError::ZeroStart);
                }
                if n_max <= n0 {
                    return Err(StatsError::EmptyScheme);
                }
                let mut windows = Vec::new();
                let mut lo = *n0;
                while lo < *n_max {
                    let full = lo.checked_mul(2);
                    let hi = full.map_or(*n_max, |h| h.min(*n_max));
                    windows.push(Window {
                        t: windows.len() + 1,
                        lo,
                        hi,
                        truncated: full != Some(hi),
                    });
                    lo = hi;
                }
                Ok(windows)
            }
            GenerationScheme::Explicit { boundaries } => {
                if boundaries.len() < 2 {
                    return Err(StatsError::EmptyScheme);
                }
                if boundaries[0] < 1 {
                    return Err(StatsError::ZeroStart);
                }
                if boundaries.windows(2).any(|pair| pair[0] >= pair[1]) {
                    return Err(StatsError::BoundariesNotIncreasing);
                }
                Ok(boundaries
                    .windows(2)
                    .enumerate()
                    .map(|(i, pair)| Window {
                        t: i + 1,
                        lo: pair[0],
                        hi: pair[1],
                        truncated: false,
                    })
                    .collect())
            }
        }
    }
}

/// Per-generation moments of S. Means and variance are floats, but they are
/// exact integer ratios rounded once: the sums of 2S and (2S)² are
/// accumulated in 128-bit integers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenerationRow {
    pub t: usize,
    pub lo: u64,
    pub hi: u64,
    pub count: u64,
    /// ⟨S⟩ over the window.
    pub mean: f64,
    /// ⟨S²⟩ over the window.
    pub mean_sq: f64,
    /// M_t² = ⟨S²⟩ − ⟨S⟩².
    pub variance: f64,
    /// M_t = √variance.
    pub stddev: f64,
    pub truncated: bool,
}

/// Moments for every generation, plus human-readable notes about anything
/// that makes the numbers less comparable (truncated windows, degenerate
/// variances).
#[derive(Debug, Clone, PartialEq)]
pub struct GenerationStats {
    pub rows: Vec<GenerationRow>,
    pub notes: Vec<String>,
}

/// Computes per-window moments from deviations.
///
/// `deviations` must cover a contiguous ascending index range (as produced
/// by [`deviations`]) that contains every window.
pub fn moments(
    deviations: &[Deviation],
    windows: &[Window],
) -> Result<GenerationStats, StatsError> {
    if windows.is_empty() {
        return Err(StatsError::EmptyScheme);
    }
    let (first, last) = match (deviations.first(), deviations.last()) {
        (Some(f), Some(l)) => (f.n, l.n),
        _ => return Err(StatsError::NonContiguousDeviations),
    };
    if last - first + 1 != deviations.len() as u64 {
        return Err(StatsError::NonContiguousDeviations);
    }
    let mut rows = Vec::with_capacity(windows.len());
    let mut notes = Vec::new();
    for window in windows {
        if window.lo + 1 < first || window.hi > last || window.lo >= window.hi {
            return Err(StatsError::WindowOutOfRange {
                lo: window.lo,
                hi: window.hi,
            });
        }
        let start = (window.lo + 1 - first) as usize;
        let end = (window.hi + 1 - first) as usize;
        let samples = &deviations[start..end];
        let overflow = || StatsError::AccumulatorOverflow { t: window.t };
        let mut sum: i128 = 0;
        let mut sum_sq: i128 = 0;
        for d in samples {
            let x = i128::from(d.twice_s);
            sum = sum.checked_add(x).ok_or_else(overflow)?;
            sum_sq = sum_sq.checked_add(x * x).ok_or_else(overflow)?;
        }
        let m = samples.len() as i128;
        // m·Σx² − (Σx)² ≥ 0 exactly (Cauchy–Schwarz on integers), so the
        // clamp below can only ever fire on accumulator bugs.
        let numerator = m
            .checked_mul(sum_sq)
            .and_then(|ms| ms.checked_sub(sum.checked_mul(sum)?))
            .ok_or_else(overflow)?;
        if numerator < 0 {
            notes.push(format!(
                "generation {}: variance numerator negative ({numerator}); clamped to 0",
                window.t
            ));
        }
        let count = samples.len() as u64;
        let variance = numerator.max(0) as f64 / (4.0 * (m * m) as f64);
        if window.truncated {
            notes.push(format!(
                "generation {}: window ({}, {}] is truncated below a full doubling; its M and the neighbouring alpha values are not scale-comparable",
                window.t, window.lo, window.hi
            ));
        }
        rows.push(GenerationRow {
            t: window.t,
            lo: window.lo,
            hi: window.hi,
            count,
            mean: sum as f64 / (2.0 * m as f64),
            mean_sq: sum_sq as f64 / (4.0 * m as f64),
            variance,
            stddev: variance.sqrt(),
            truncated: window.truncated,
        });
    }
    Ok(GenerationStats { rows, notes })
}

/// One α entry; `alpha` is `None` when the previous generation had zero
/// deviation spread, which leaves log₂(M_t/M_{t−1}) undefined.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaPoint {
    pub t: usize,
    pub alpha: Option<f64>,
}

/// The exponent series α(t) = log₂(M_t / M_{t−1}) for t ≥ 2.
///
/// # Examples
///
/// ```
/// use metafib::genstats::{alpha_series, GenerationRow, GenerationStats};
///
/// let row = |t, stddev| GenerationRow {
///     t, lo: 0, hi: 0, count: 1, mean: 0.0, mean_sq: 0.0,
///     variance: stddev * stddev, stddev, truncated: false,
/// };
/// let stats = GenerationStats {
///     rows: vec![row(1, 1.0), row(2, 2.0), row(3, 4.0)],
///     notes: vec![],
/// };
/// let alphas: Vec<f64> = alpha_series(&stats).iter().map(|a| a.alpha.unwrap()).collect();
/// assert_eq!(alphas, [1.0, 1.0]);
/// ```
pub fn alpha_series(stats: &GenerationStats) -> Vec<AlphaPoint> {
    stats
        .rows
        .windows(2)
        .map(|pair| AlphaPoint {
            t: pair[1].t,
            alpha: (pair[0].stddev > 0.0).then(|| (pair[1].stddev / pair[0].stddev).log2()),
        })
        .collect()
}
