//! Synthetic references, scripted tracker estimates and activation curves.

mod scenario;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

pub use scenario::{load_scenario, parse_scenario};

use crate::error::{Error, Result};
use crate::types::{ActivationFunction, BeatSequence, Condition, MetricLevel};

/// Piecewise-linear tempo in BPM, held constant outside its knots.
#[derive(Debug, Clone, PartialEq)]
pub struct TempoCurve {
    knots: Vec<(f64, f64)>,
}

impl TempoCurve {
    pub fn constant(bpm: f64) -> Result<Self> {
        Self::new(vec![(0.0, bpm)])
    }

    /// `knots` are `(time_seconds, bpm)` pairs with strictly increasing times.
    pub fn new(knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.is_empty() {
            return Err(Error::Scenario(
                "tempo curve needs at least one knot".into(),
            ));
        }
        if knots
            .iter()
            .any(|&(t, bpm)| !(t.is_finite() && t >= 0.0 && bpm.is_finite() && bpm > 0.0))
        {
            return Err(Error::Scenario(
                "tempo knots need non-negative times and positive BPM".into(),
            ));
        }
        if knots.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::Scenario("tempo knot times must increase".into()));
        }
        Ok(TempoCurve { knots })
    }

    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }

    pub fn bpm_at(&self, t: f64) -> f64 {
        let k = &self.knots;
        let idx = k.partition_point(|&(kt, _)| kt <= t);
        if idx == 0 {
            return k[0].1;
        }
        if idx == k.len() {
            return k[k.len() - 1].1;
        }
        let ((t0, a), (t1, b)) = (k[idx - 1], k[idx]);
        a + (b - a) * (t - t0) / (t1 - t0)
    }

    /// `(start, start_bpm, slope_bpm_per_s, end)` pieces covering `[0, ∞)`.
    fn pieces(&self) -> Vec<(f64, f64, f64, f64)> {
        let k = &self.knots;
        let mut out = Vec::with_capacity(k.len() + 1);
        if k[0].0 > 0.0 {
            out.push((0.0, k[0].1, 0.0, k[0].0));
        }
        for w in k.windows(2) {
            let ((t0, a), (t1, b)) = (w[0], w[1]);
            out.push((t0, a, (b - a) / (t1 - t0), t1));
        }
        let (tl, bl) = k[k.len() - 1];
        out.push((tl, bl, 0.0, f64::INFINITY));
        out
    }
}

/// Places beats at whole multiples of the integrated tempo, starting with
/// a beat at 0 and stopping before `duration`.
pub fn gen_reference(curve: &TempoCurve, duration: f64) -> Result<BeatSequence> {
    if !(duration.is_finite() && duration > 0.0) {
        return Err(Error::Scenario(format!(
            "duration must be > 0, got {duration}"
        )));
    }
    let mut times = Vec::new();
    let mut phase = 0.0;
    let mut next_beat = 0.0f64;
    'pieces: for (start, bpm, slope, end) in curve.pieces() {
        let len = end - start;
        let phase_end = if slope == 0.0 {
            phase + bpm * len / 60.0
        } else {
            phase + (bpm * len + 0.5 * slope * len * len) / 60.0
        };
        while next_beat < phase_end {
            // solve phase + (bpm Δ + slope Δ²/2) / 60 = next_beat for Δ >= 0
            let c = 60.0 * (next_beat - phase);
            let delta = 2.0 * c / (bpm + (bpm * bpm + 2.0 * slope * c).sqrt());
            let t = start + delta;
            if t >= duration {
                break 'pieces;
            }
            times.push(t);
            next_beat += 1.0;
        }
        if end >= duration {
            break;
        }
        phase = phase_end;
    }
    BeatSequence::new(times)
}

/// A run of reference beats over which the simulated tracker holds one
/// metric level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    /// First reference beat index of the run.
    pub start: usize,
    pub condition: Condition,
    /// Standard deviation of Gaussian timing noise, seconds.
    pub jitter_std: f64,
}

/// Activation rendering settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActivationSettings {
    pub fps: f64,
    /// Standard deviation of each beat bump, seconds.
    pub peak_width: f64,
    pub noise_std: f64,
}

impl Default for ActivationSettings {
    fn default() -> Self {
        ActivationSettings {
            fps: 100.0,
            peak_width: 0.02,
            noise_std: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub tempo: TempoCurve,
    pub duration: f64,
    pub segments: Vec<Segment>,
    pub activation: ActivationSettings,
}

impl Scenario {
    /// Single-segment scenario.
    pub fn uniform(
        tempo: TempoCurve,
        duration: f64,
        condition: Condition,
        jitter_std: f64,
    ) -> Self {
        Scenario {
            tempo,
            duration,
            segments: vec![Segment {
                start: 0,
                condition,
                jitter_std,
            }],
            activation: ActivationSettings::default(),
        }
    }

    pub fn reference(&self) -> Result<BeatSequence> {
        gen_reference(&self.tempo, self.duration)
    }

    /// Checks segment layout against a reference of `n_beats` beats.
    pub fn validate(&self, n_beats: usize) -> Result<()> {
        let first = self
            .segments
            .first()
            .ok_or_else(|| Error::Scenario("no segments".into()))?;
        if first.start != 0 {
            return Err(Error::Scenario("first segment must start at beat 0".into()));
        }
        if self.segments.windows(2).any(|w| w[1].start <= w[0].start) {
            return Err(Error::Scenario("segment starts must increase".into()));
        }
        if let Some(last) = self.segments.last().filter(|s| s.start >= n_beats) {
            return Err(Error::Scenario(format!(
                "segment starts at beat {} but the reference has {n_beats} beats",
                last.start
            )));
        }
        if self
            .segments
            .iter()
            .any(|s| !(s.jitter_std.is_finite() && s.jitter_std >= 0.0))
        {
            return Err(Error::Scenario(
                "jitter must be a non-negative number".into(),
            ));
        }
        Ok(())
    }
}

fn truncated_normal(rng: &mut ChaCha8Rng, std: f64) -> f64 {
    if std == 0.0 {
        return 0.0;
    }
    let normal = Normal::new(0.0, std).expect("std is finite and positive");
    normal.sample(rng).clamp(-3.0 * std, 3.0 * std)
}

/// Simulated tracker output: each segment emits its condition's variant of
/// the reference beats it owns, plus optional jitter.
///
/// Interpolated and offbeat points belong to the segment of the interval's
/// first beat. Jitter is truncated at ±3σ and clamped at 0; a sequence
/// that loses its ordering is re-sorted with a warning.
pub fn gen_estimate(
    reference: &BeatSequence,
    scenario: &Scenario,
    seed: u64,
) -> Result<BeatSequence> {
    let n = reference.len();
    scenario.validate(n)?;
    let b = reference.times();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut times = Vec::with_capacity(n * 2);

    for (s, seg) in scenario.segments.iter().enumerate() {
        let end = scenario.segments.get(s + 1).map_or(n, |next| next.start);
        let mut emit = |t: f64, rng: &mut ChaCha8Rng| {
            times.push((t + truncated_normal(rng, seg.jitter_std)).max(0.0));
        };
        for k in seg.start..end {
            let span = b.get(k + 1).map(|next| next - b[k]);
            match seg.condition.level() {
                MetricLevel::Subsample(d) => {
                    if (k - seg.start) % d == 0 {
                        emit(b[k], &mut rng);
                    }
                }
                MetricLevel::Interpolate(h) => {
                    emit(b[k], &mut rng);
                    if let Some(span) = span {
                        for q in 1..h {
                            emit(b[k] + span * (q as f64 / h as f64), &mut rng);
                        }
                    }
                }
                MetricLevel::Offset(f) => {
                    if let Some(span) = span {
                        emit(b[k] + f * span, &mut rng);
                    }
                }
            }
        }
    }

    if times.windows(2).any(|w| w[1] < w[0]) {
        log::warn!("jittered estimate lost its ordering; re-sorting");
        times.sort_by(f64::total_cmp);
    }
    let before = times.len();
    times.dedup();
    if times.len() != before {
        log::warn!(
            "dropped {} coincident estimated beats",
            before - times.len()
        );
    }
    BeatSequence::new(times)
}

/// Sum of Gaussian bumps at the beats, clipped to `[0, 1]`, plus optional
/// seeded noise. Frames cover `[0, duration)`.
pub fn gen_activation(
    beats: &BeatSequence,
    settings: &ActivationSettings,
    duration: f64,
    seed: u64,
) -> Result<ActivationFunction> {
    let ActivationSettings {
        fps,
        peak_width,
        noise_std,
    } = *settings;
    if !(fps.is_finite() && fps > 0.0) {
        return Err(Error::InvalidParams(format!("fps must be > 0, got {fps}")));
    }
    if !(peak_width.is_finite() && peak_width > 0.0) {
        return Err(Error::InvalidParams(format!(
            "peak width must be > 0, got {peak_width}"
        )));
    }
    if !(noise_std.is_finite() && noise_std >= 0.0) {
        return Err(Error::InvalidParams(format!(
            "noise must be >= 0, got {noise_std}"
        )));
    }
    let n_frames = (duration * fps).ceil().max(0.0) as usize;
    let reach = 6.0 * peak_width;
    let b = beats.times();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = (noise_std > 0.0).then(|| Normal::new(0.0, noise_std).expect("valid std"));
    let values = (0..n_frames)
        .map(|f| {
            let t = f as f64 / fps;
            let lo = b.partition_point(|&x| x < t - reach);
            let hi = b.partition_point(|&x| x <= t + reach);
            let bumps: f64 = b[lo..hi]
                .iter()
                .map(|&x| (-0.5 * ((t - x) / peak_width).powi(2)).exp())
                .sum();
            let noisy = bumps.min(1.0) + noise.map_or(0.0, |d| d.sample(&mut rng));
            noisy.clamp(0.0, 1.0)
        })
        .collect();
    ActivationFunction::new(fps, values)
}
