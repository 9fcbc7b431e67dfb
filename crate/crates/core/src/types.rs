//! Domain types shared by every stage of the evaluation pipeline.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Strictly increasing, finite, non-negative event times in seconds.
///
/// Used for both reference annotations and tracker estimates. An empty
/// sequence is representable (a tracker may emit nothing), but
/// [`validate_beats`] rejects empty user input.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
#[serde(transparent)]
pub struct BeatSequence(Vec<f64>);

impl BeatSequence {
    /// Builds a sequence, rejecting anything that is not strictly increasing.
    pub fn new(times: Vec<f64>) -> Result<Self> {
        check_times(&times, false)?;
        Ok(BeatSequence(times))
    }

    pub fn empty() -> Self {
        BeatSequence(Vec::new())
    }

    pub fn times(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> Option<f64> {
        self.0.first().copied()
    }

    pub fn last(&self) -> Option<f64> {
        self.0.last().copied()
    }

    /// Consecutive differences (inter-beat intervals).
    pub fn intervals(&self) -> impl Iterator<Item = f64> + '_ {
        self.0.windows(2).map(|w| w[1] - w[0])
    }

    /// Mean inter-beat interval, `None` with fewer than two beats.
    pub fn mean_ibi(&self) -> Option<f64> {
        if self.0.len() < 2 {
            return None;
        }
        Some(self.intervals().sum::<f64>() / (self.0.len() - 1) as f64)
    }
}

impl<'de> Deserialize<'de> for BeatSequence {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let times = Vec::<f64>::deserialize(deserializer)?;
        BeatSequence::new(times).map_err(serde::de::Error::custom)
    }
}

impl AsRef<[f64]> for BeatSequence {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// Result of [`validate_beats`]: the cleaned sequence and how many exact
/// duplicates were dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidatedBeats {
    pub beats: BeatSequence,
    pub duplicates: usize,
}

/// Validates raw annotation times. Exact duplicates are collapsed and
/// counted; any decrease is an error.
pub fn validate_beats(raw: &[f64]) -> Result<ValidatedBeats> {
    if raw.is_empty() {
        return Err(Error::EmptySequence);
    }
    check_times(raw, true)?;
    let mut times = Vec::with_capacity(raw.len());
    let mut duplicates = 0;
    for &t in raw {
        if times.last() == Some(&t) {
            duplicates += 1;
        } else {
            times.push(t);
        }
    }
    Ok(ValidatedBeats {
        beats: BeatSequence(times),
        duplicates,
    })
}

fn check_times(times: &[f64], allow_equal: bool) -> Result<()> {
    for (index, &time) in times.iter().enumerate() {
        if !time.is_finite() {
            return Err(Error::NonFinite { index });
        }
        if time < 0.0 {
            return Err(Error::NegativeTime { index, time });
        }
        if index > 0 {
            let prev = times[index - 1];
            if time < prev || (!allow_equal && time == prev) {
                return Err(Error::NonMonotonic { index, time });
            }
        }
    }
    Ok(())
}

/// How a metric-level condition derives its variant from the reference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MetricLevel {
    /// Keep every `stride`-th beat (1 = onbeat).
    Subsample(usize),
    /// Insert `factor - 1` evenly spaced points into every interval.
    Interpolate(usize),
    /// Shift into each interval by this fraction of its length.
    Offset(f64),
}

/// The ten metric-level conditions, in report order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Condition {
    Onbeat,
    OffbeatHalf,
    OffbeatOneThird,
    OffbeatTwoThird,
    SubharmonicHalf,
    SubharmonicThird,
    SubharmonicQuarter,
    HarmonicDouble,
    HarmonicTriple,
    HarmonicQuadruple,
}

impl Condition {
    pub const ALL: [Condition; 10] = [
        Condition::Onbeat,
        Condition::OffbeatHalf,
        Condition::OffbeatOneThird,
        Condition::OffbeatTwoThird,
        Condition::SubharmonicHalf,
        Condition::SubharmonicThird,
        Condition::SubharmonicQuarter,
        Condition::HarmonicDouble,
        Condition::HarmonicTriple,
        Condition::HarmonicQuadruple,
    ];

    pub const OFFBEATS: [Condition; 3] = [
        Condition::OffbeatHalf,
        Condition::OffbeatOneThird,
        Condition::OffbeatTwoThird,
    ];

    /// Position in [`Condition::ALL`].
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Condition::Onbeat => "onbeat",
            Condition::OffbeatHalf => "offbeat_half",
            Condition::OffbeatOneThird => "offbeat_one_third",
            Condition::OffbeatTwoThird => "offbeat_two_third",
            Condition::SubharmonicHalf => "subharmonic_half",
            Condition::SubharmonicThird => "subharmonic_third",
            Condition::SubharmonicQuarter => "subharmonic_quarter",
            Condition::HarmonicDouble => "harmonic_double",
            Condition::HarmonicTriple => "harmonic_triple",
            Condition::HarmonicQuadruple => "harmonic_quadruple",
        }
    }

    pub fn level(self) -> MetricLevel {
        match self {
            Condition::Onbeat => MetricLevel::Subsample(1),
            Condition::OffbeatHalf => MetricLevel::Offset(0.5),
            Condition::OffbeatOneThird => MetricLevel::Offset(1.0 / 3.0),
            Condition::OffbeatTwoThird => MetricLevel::Offset(2.0 / 3.0),
            Condition::SubharmonicHalf => MetricLevel::Subsample(2),
            Condition::SubharmonicThird => MetricLevel::Subsample(3),
            Condition::SubharmonicQuarter => MetricLevel::Subsample(4),
            Condition::HarmonicDouble => MetricLevel::Interpolate(2),
            Condition::HarmonicTriple => MetricLevel::Interpolate(3),
            Condition::HarmonicQuadruple => MetricLevel::Interpolate(4),
        }
    }

    pub fn is_offbeat(self) -> bool {
        matches!(self.level(), MetricLevel::Offset(_))
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Condition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Condition::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::InvalidParams(format!("unknown condition `{s}`")))
    }
}

impl Serialize for Condition {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for Condition {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let name = String::deserialize(deserializer)?;
        name.parse().map_err(serde::de::Error::custom)
    }
}

/// Matching tolerance and context length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceParams {
    /// Upper bound on the tolerance window, seconds.
    pub cap: f64,
    /// Tolerance as a fraction of the mean inter-beat interval.
    pub gamma: f64,
    /// Number of consecutive reference beats per window.
    pub context_len: usize,
}

impl Default for ToleranceParams {
    fn default() -> Self {
        ToleranceParams {
            cap: 0.070,
            gamma: 0.175,
            context_len: 2,
        }
    }
}

impl ToleranceParams {
    pub fn new(cap: f64, gamma: f64, context_len: usize) -> Result<Self> {
        let params = ToleranceParams {
            cap,
            gamma,
            context_len,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn with_context_len(self, context_len: usize) -> Result<Self> {
        ToleranceParams::new(self.cap, self.gamma, context_len)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.cap.is_finite() && self.cap > 0.0) {
            return Err(Error::InvalidParams(format!(
                "cap must be > 0, got {}",
                self.cap
            )));
        }
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(Error::InvalidParams(format!(
                "gamma must lie in (0, 1), got {}",
                self.gamma
            )));
        }
        if self.context_len < 2 {
            return Err(Error::InvalidParams(format!(
                "context length must be >= 2, got {}",
                self.context_len
            )));
        }
        Ok(())
    }
}

/// Uniformly sampled beat likelihood curve.
#[derive(Debug, Clone, PartialEq)]
pub struct ActivationFunction {
    fps: f64,
    values: Vec<f64>,
}

impl ActivationFunction {
    pub fn new(fps: f64, values: Vec<f64>) -> Result<Self> {
        if !(fps.is_finite() && fps > 0.0) {
            return Err(Error::InvalidParams(format!("fps must be > 0, got {fps}")));
        }
        if let Some(bad) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::InvalidParams(format!(
                "activation value {bad} outside [0, 1]"
            )));
        }
        Ok(ActivationFunction { fps, values })
    }

    pub fn fps(&self) -> f64 {
        self.fps
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Length of the curve in seconds.
    pub fn duration(&self) -> f64 {
        self.values.len() as f64 / self.fps
    }

    pub fn frame_time(&self, frame: usize) -> f64 {
        frame as f64 / self.fps
    }
}

/// Per-reference-beat coverage for every condition plus the derived
/// union rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverageMatrix {
    rows: [Vec<bool>; 10],
    any_row: Vec<bool>,
    offbeat_row: Vec<bool>,
}

impl CoverageMatrix {
    /// All-false matrix for `n_beats` reference beats.
    pub fn empty(n_beats: usize) -> Self {
        Self::from_rows(std::array::from_fn(|_| vec![false; n_beats])).expect("uniform row lengths")
    }

    /// Builds a matrix from one row per condition, in [`Condition::ALL`]
    /// order, and derives the union rows.
    pub fn from_rows(rows: [Vec<bool>; 10]) -> Result<Self> {
        let n = rows[0].len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidParams(
                "coverage rows must have equal length".into(),
            ));
        }
        let any_row = (0..n).map(|k| rows.iter().any(|r| r[k])).collect();
        let offbeat_row = (0..n)
            .map(|k| Condition::OFFBEATS.iter().any(|c| rows[c.index()][k]))
            .collect();
        Ok(CoverageMatrix {
            rows,
            any_row,
            offbeat_row,
        })
    }

    pub fn n_beats(&self) -> usize {
        self.any_row.len()
    }

    pub fn row(&self, condition: Condition) -> &[bool] {
        &self.rows[condition.index()]
    }

    pub fn any_row(&self) -> &[bool] {
        &self.any_row
    }

    pub fn offbeat_row(&self) -> &[bool] {
        &self.offbeat_row
    }

    /// Bit `c.index()` is set when beat `k` is covered under `c`.
    pub fn condition_mask(&self, k: usize) -> u16 {
        self.rows
            .iter()
            .enumerate()
            .filter(|(_, r)| r[k])
            .fold(0, |mask, (i, _)| mask | (1 << i))
    }
}
