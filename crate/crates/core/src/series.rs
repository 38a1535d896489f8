//! Univariate series ingestion.
//!
//! A [`TimeSeries`] is a gap-free run of `(t, value)` observations with unit
//! time steps. Everything downstream indexes it by `t`, so the invariants are
//! checked once here and relied upon afterwards.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

/// Minimum number of observations: one pairwise group plus a target.
pub const MIN_LEN: usize = 3;

#[derive(Debug, Error)]
pub enum SeriesError {
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("time index is not contiguous: {prev} is followed by {next}")]
    Gap { prev: i64, next: i64 },
    #[error("series has {len} observations, at least {MIN_LEN} are required")]
    TooShort { len: usize },
    #[error("non-finite value at t = {t}")]
    NonFinite { t: i64 },
    #[error("t = {t} is outside the series range [{start}, {end}]")]
    OutOfRange { t: i64, start: i64, end: i64 },
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub t: i64,
    pub value: f64,
}

/// Ordered, gap-free observations. Immutable once constructed.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    observations: Vec<Observation>,
}

impl TimeSeries {
    /// Validates and sorts `observations` by time index.
    pub fn new(mut observations: Vec<Observation>) -> Result<Self, SeriesError> {
        observations.sort_by_key(|o| o.t);
        if let Some(o) = observations.iter().find(|o| !o.value.is_finite()) {
            return Err(SeriesError::NonFinite { t: o.t });
        }
        for w in observations.windows(2) {
            if w[1].t != w[0].t + 1 {
                return Err(SeriesError::Gap {
                    prev: w[0].t,
                    next: w[1].t,
                });
            }
        }
        if observations.len() < MIN_LEN {
            return Err(SeriesError::TooShort {
                len: observations.len(),
            });
        }
        Ok(Self { observations })
    }

    /// Builds a series whose first observation sits at `start`.
    pub fn from_values(start: i64, values: &[f64]) -> Result<Self, SeriesError> {
        let observations = values
            .iter()
            .enumerate()
            .map(|(i, &value)| Observation {
                t: start + i as i64,
                value,
            })
            .collect();
        Self::new(observations)
    }

    pub fn load_csv(path: impl AsRef<Path>) -> Result<Self, SeriesError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| SeriesError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse_csv(&text)
    }

    /// Parses two-column `t,value` CSV text. A first row whose leading field
    /// is not an integer is taken as a header.
    pub fn parse_csv(text: &str) -> Result<Self, SeriesError> {
        let mut observations = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim_end_matches('\r').trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != 2 {
                return Err(SeriesError::Parse {
                    line: line_no,
                    message: format!("expected 2 fields, found {}", fields.len()),
                });
            }
            let t = match fields[0].parse::<i64>() {
                Ok(t) => t,
                Err(_) if observations.is_empty() && is_header(fields[0]) => continue,
                Err(_) => {
                    return Err(SeriesError::Parse {
                        line: line_no,
                        message: format!("invalid time index {:?}", fields[0]),
                    })
                }
            };
            let value = fields[1].parse::<f64>().map_err(|_| SeriesError::Parse {
                line: line_no,
                message: format!("invalid value {:?}", fields[1]),
            })?;
            observations.push(Observation { t, value });
        }
        Self::new(observations)
    }

    pub fn value_at(&self, t: i64) -> Result<f64, SeriesError> {
        self.index_of(t)
            .map(|i| self.observations[i].value)
            .ok_or(SeriesError::OutOfRange {
                t,
                start: self.start(),
                end: self.end(),
            })
    }

    /// Position of `t` in the observation list, if present.
    pub fn index_of(&self, t: i64) -> Option<usize> {
        let offset = t.checked_sub(self.start())?;
        usize::try_from(offset)
            .ok()
            .filter(|&i| i < self.observations.len())
    }

    pub fn start(&self) -> i64 {
        self.observations[0].t
    }

    pub fn end(&self) -> i64 {
        self.observations[self.observations.len() - 1].t
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }

    pub fn observations(&self) -> &[Observation] {
        &self.observations
    }

    pub fn values(&self) -> Vec<f64> {
        self.observations.iter().map(|o| o.value).collect()
    }

    pub fn min_value(&self) -> f64 {
        self.observations
            .iter()
            .map(|o| o.value)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.observations
            .iter()
            .map(|o| o.value)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// True when every value is a whole number.
    pub fn is_integer_valued(&self) -> bool {
        self.observations.iter().all(|o| o.value.fract() == 0.0)
    }

    /// SHA-256 over the canonical `t,value` lines, hex encoded.
    pub fn fingerprint(&self) -> String {
        let mut canon = String::new();
        for o in &self.observations {
            let _ = writeln!(canon, "{},{}", o.t, o.value);
        }
        hex::encode(Sha256::digest(canon.as_bytes()))
    }
}

fn is_header(field: &str) -> bool {
    field.parse::<f64>().is_err()
}
