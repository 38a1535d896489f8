//! Automatic trapezoidal fuzzification.
//!
//! The segment length is the revised average distance between consecutive
//! sorted values: gaps further than one standard deviation from the mean gap
//! are dropped before averaging. The universe is the data range widened by
//! one segment on each side, and the number of sets follows from fitting
//! `2n + 1` segments into it. Interior breakpoints are then re-spaced so that
//! the smallest value opens the first crisp interval and the largest value
//! closes the last one.
//!
//! Integer-valued inputs keep every derived quantity on the integer grid
//! (round half up), which is how printed fuzzification tables are usually
//! produced.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::series::TimeSeries;

/// Memberships closer than this to 0.5 count as a two-set tie.
pub const TIE_EPSILON: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum FuzzifyError {
    #[error("at least 2 values are required, got {len}")]
    TooFewValues { len: usize },
    #[error("series is constant (min = max = {value}); no universe can be partitioned")]
    DegenerateSeries { value: f64 },
    #[error("invalid segment length {segment} for range {range}")]
    InvalidSegment { range: f64, segment: f64 },
    #[error("value {value} at t = {t} lies outside the universe [{lower}, {upper}]")]
    OutOfUniverse {
        t: i64,
        value: f64,
        lower: f64,
        upper: f64,
    },
}

pub fn round_half_up(x: f64) -> f64 {
    (x + 0.5).floor()
}

/// Whether derived quantities are snapped to whole numbers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ValueScale {
    Integer,
    Continuous,
}

impl ValueScale {
    pub fn of(values: &[f64]) -> Self {
        if values.iter().all(|v| v.fract() == 0.0) {
            ValueScale::Integer
        } else {
            ValueScale::Continuous
        }
    }

    pub fn apply(self, x: f64) -> f64 {
        match self {
            ValueScale::Integer => round_half_up(x),
            ValueScale::Continuous => x,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FuzzificationStats {
    pub avg_distance: f64,
    pub std_dev: f64,
    pub revised_avg_distance: f64,
    pub scale: ValueScale,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Universe {
    pub lower: f64,
    pub upper: f64,
    pub range: f64,
}

impl Universe {
    pub fn new(lower: f64, upper: f64) -> Self {
        Self {
            lower,
            upper,
            range: upper - lower,
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        (self.lower..=self.upper).contains(&x)
    }
}

/// Trapezoidal fuzzy number `(a, b, c, d)`; `[b, c]` is the crisp interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrapezoidalSet {
    pub index: usize,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl TrapezoidalSet {
    /// Piecewise-linear membership degree. Vertical edges (`a == b` or
    /// `c == d`) count as inside the core.
    pub fn membership(&self, x: f64) -> f64 {
        if x < self.a || x > self.d {
            0.0
        } else if x >= self.b && x <= self.c {
            1.0
        } else if x < self.b {
            (x - self.a) / (self.b - self.a)
        } else {
            (self.d - x) / (self.d - self.c)
        }
    }

    pub fn crisp_interval(&self) -> (f64, f64) {
        (self.b, self.c)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Partitioning {
    pub universe: Universe,
    pub sets: Vec<TrapezoidalSet>,
    pub segment_length: f64,
    pub n_sets: usize,
}

impl Partitioning {
    /// Set by 1-based index.
    pub fn set(&self, index: usize) -> Option<&TrapezoidalSet> {
        index.checked_sub(1).and_then(|i| self.sets.get(i))
    }

    /// Spacing actually used between interior breakpoints.
    pub fn adapted_segment(&self) -> f64 {
        let first = &self.sets[0];
        let last = &self.sets[self.sets.len() - 1];
        (last.c - first.b) / (2 * self.n_sets - 1) as f64
    }

    pub fn fingerprint(&self) -> String {
        let mut canon = format!(
            "U {} {} S {} n {}\n",
            self.universe.lower, self.universe.upper, self.segment_length, self.n_sets
        );
        for s in &self.sets {
            let _ = writeln!(canon, "A{} {} {} {} {}", s.index, s.a, s.b, s.c, s.d);
        }
        hex::encode(Sha256::digest(canon.as_bytes()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FuzzifiedObservation {
    pub t: i64,
    pub primary_set: usize,
    pub secondary_set: Option<usize>,
    pub membership_primary: f64,
    pub membership_secondary: Option<f64>,
}

fn sorted_gaps(values: &[f64]) -> Result<Vec<f64>, FuzzifyError> {
    if values.len() < 2 {
        return Err(FuzzifyError::TooFewValues { len: values.len() });
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(sorted.windows(2).map(|w| w[1] - w[0]).collect())
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Mean distance between consecutive values after sorting.
pub fn average_distance(values: &[f64]) -> Result<f64, FuzzifyError> {
    sorted_gaps(values).map(|g| mean(&g))
}

/// Population standard deviation of the sorted gaps around `avg`.
pub fn std_dev_of_gaps(values: &[f64], avg: f64) -> Result<f64, FuzzifyError> {
    let gaps = sorted_gaps(values)?;
    let var = gaps.iter().map(|g| (g - avg).powi(2)).sum::<f64>() / gaps.len() as f64;
    Ok(var.sqrt())
}

/// Average gap after discarding gaps more than one standard deviation away
/// from the mean. Falls back to the plain average when nothing survives.
pub fn revised_average_distance(values: &[f64]) -> Result<FuzzificationStats, FuzzifyError> {
    let scale = ValueScale::of(values);
    let gaps = sorted_gaps(values)?;
    let raw_avg = mean(&gaps);
    if raw_avg == 0.0 {
        return Err(FuzzifyError::DegenerateSeries { value: values[0] });
    }
    let avg = scale.apply(raw_avg);
    let std_dev = scale.apply(std_dev_of_gaps(values, avg)?);

    let kept: Vec<f64> = gaps
        .iter()
        .copied()
        .filter(|g| (avg - std_dev..=avg + std_dev).contains(g))
        .collect();
    let mut revised = if kept.is_empty() {
        avg
    } else {
        scale.apply(mean(&kept))
    };
    if revised <= 0.0 {
        revised = if avg > 0.0 { avg } else { raw_avg };
    }

    Ok(FuzzificationStats {
        avg_distance: avg,
        std_dev,
        revised_avg_distance: revised,
        scale,
    })
}

pub fn universe_of(
    stats: &FuzzificationStats,
    d_min: f64,
    d_max: f64,
) -> Result<Universe, FuzzifyError> {
    if d_min >= d_max {
        return Err(FuzzifyError::DegenerateSeries { value: d_min });
    }
    let seg = stats.revised_avg_distance;
    if !(seg > 0.0 && seg.is_finite()) {
        return Err(FuzzifyError::InvalidSegment {
            range: d_max - d_min,
            segment: seg,
        });
    }
    Ok(Universe::new(d_min - seg, d_max + seg))
}

/// `(R - S) / 2S` rounded half up, at least 1.
pub fn number_of_sets(range: f64, segment: f64) -> Result<usize, FuzzifyError> {
    if !(segment > 0.0 && segment.is_finite() && range > segment && range.is_finite()) {
        return Err(FuzzifyError::InvalidSegment { range, segment });
    }
    let n = round_half_up((range - segment) / (2.0 * segment));
    Ok((n as usize).max(1))
}

pub fn build_partitioning(
    stats: &FuzzificationStats,
    d_min: f64,
    d_max: f64,
) -> Result<Partitioning, FuzzifyError> {
    let universe = universe_of(stats, d_min, d_max)?;
    let segment = stats.revised_avg_distance;
    let n = number_of_sets(universe.range, segment)?;

    // Breakpoint grid p_0 = d_min .. p_{2n-1} = d_max, with the universe
    // bounds standing in at both ends.
    let steps = 2 * n - 1;
    let adapted = (d_max - d_min) / steps as f64;
    // Snapping a grid finer than 1 would merge neighbouring breakpoints.
    let scale = if adapted >= 1.0 {
        stats.scale
    } else {
        ValueScale::Continuous
    };
    let point = |k: isize| -> f64 {
        if k < 0 {
            universe.lower
        } else if k as usize > steps {
            universe.upper
        } else if k as usize == steps {
            d_max
        } else {
            scale.apply(d_min + k as f64 * adapted)
        }
    };

    let sets = (1..=n)
        .map(|i| {
            let base = 2 * (i as isize - 1);
            TrapezoidalSet {
                index: i,
                a: point(base - 1),
                b: point(base),
                c: point(base + 1),
                d: point(base + 2),
            }
        })
        .collect();

    Ok(Partitioning {
        universe,
        sets,
        segment_length: segment,
        n_sets: n,
    })
}

/// Computes the statistics and partitioning for a whole series.
pub fn partition_series(
    series: &TimeSeries,
) -> Result<(FuzzificationStats, Partitioning), FuzzifyError> {
    let stats = revised_average_distance(&series.values())?;
    let partitioning = build_partitioning(&stats, series.min_value(), series.max_value())?;
    Ok((stats, partitioning))
}

/// Labels `x` with its maximal-membership set; `None` outside the universe.
pub fn classify(partitioning: &Partitioning, t: i64, x: f64) -> Option<FuzzifiedObservation> {
    if !partitioning.universe.contains(x) {
        return None;
    }
    let mut ranked: Vec<(usize, f64)> = partitioning
        .sets
        .iter()
        .map(|s| (s.index, s.membership(x)))
        .collect();
    // Highest membership first, lower index first among equals.
    ranked.sort_by(|l, r| r.1.total_cmp(&l.1).then(l.0.cmp(&r.0)));

    let (mut primary, mut mu) = ranked[0];
    if mu == 0.0 {
        // Only reachable exactly on an outer universe bound.
        let first = &partitioning.sets[0];
        primary = if x <= first.b {
            first.index
        } else {
            partitioning.n_sets
        };
        mu = 0.0;
    }

    let tie = ranked
        .get(1)
        .filter(|&&(_, m2)| (mu - 0.5).abs() <= TIE_EPSILON && (m2 - 0.5).abs() <= TIE_EPSILON);
    Some(match tie {
        Some(&(other, m2)) => {
            let (lo, hi) = if primary < other {
                ((primary, mu), (other, m2))
            } else {
                ((other, m2), (primary, mu))
            };
            FuzzifiedObservation {
                t,
                primary_set: lo.0,
                secondary_set: Some(hi.0),
                membership_primary: lo.1.max(hi.1),
                membership_secondary: Some(lo.1.min(hi.1)),
            }
        }
        None => FuzzifiedObservation {
            t,
            primary_set: primary,
            secondary_set: None,
            membership_primary: mu,
            membership_secondary: None,
        },
    })
}

pub fn fuzzify(
    series: &TimeSeries,
    partitioning: &Partitioning,
) -> Result<Vec<FuzzifiedObservation>, FuzzifyError> {
    series
        .observations()
        .iter()
        .map(|o| {
            classify(partitioning, o.t, o.value).ok_or(FuzzifyError::OutOfUniverse {
                t: o.t,
                value: o.value,
                lower: partitioning.universe.lower,
                upper: partitioning.universe.upper,
            })
        })
        .collect()
}
