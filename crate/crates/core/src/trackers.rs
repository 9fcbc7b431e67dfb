//! Post-processing trackers turning an activation curve into beat times.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::types::{ActivationFunction, BeatSequence};

pub const DEFAULT_SPPK_THRESHOLD: f64 = 0.3;
pub const DEFAULT_SPPK_MIN_GAP: f64 = 0.15;
pub const DEFAULT_DP_LAMBDA: f64 = 100.0;

/// Frames of every local maximum at or above `threshold`. Flat tops count
/// once, at their middle frame, and only if both sides descend. The first
/// and last frame are never peaks.
pub fn local_maxima(values: &[f64], threshold: f64) -> Vec<usize> {
    let mut peaks = Vec::new();
    let n = values.len();
    let mut i = 1;
    while i + 1 < n {
        if values[i] > values[i - 1] {
            let mut end = i;
            while end + 1 < n && values[end + 1] == values[i] {
                end += 1;
            }
            if end + 1 < n && values[end + 1] < values[i] && values[i] >= threshold {
                peaks.push((i + end) / 2);
            }
            i = end + 1;
        } else {
            i += 1;
        }
    }
    peaks
}

/// Simple peak picking: local maxima at or above `threshold`, with any
/// peak closer than `min_gap` seconds to an already accepted peak dropped.
/// Peaks are accepted by decreasing value, earlier frame first on ties.
pub fn sppk(act: &ActivationFunction, threshold: f64, min_gap: f64) -> BeatSequence {
    let values = act.values();
    let mut candidates = local_maxima(values, threshold);
    candidates.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));

    let fps = act.fps();
    let too_close = |a: usize, b: usize| (a.abs_diff(b) as f64 / fps) < min_gap;
    let mut accepted = BTreeSet::new();
    for frame in candidates {
        let below = accepted.range(..frame).next_back();
        let above = accepted.range(frame..).next();
        let blocked = below.is_some_and(|&p| too_close(p, frame))
            || above.is_some_and(|&p| too_close(p, frame));
        if !blocked {
            accepted.insert(frame);
        }
    }
    let times = accepted.into_iter().map(|f| act.frame_time(f)).collect();
    BeatSequence::new(times).expect("distinct frames are increasing")
}

/// Configuration for [`dp_track_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DpConfig {
    /// Weight of the squared log-ratio penalty between a beat interval and
    /// the target period.
    pub lambda: f64,
    /// Shortest allowed interval as a fraction of the period.
    pub min_ratio: f64,
    /// Longest allowed interval as a multiple of the period.
    pub max_ratio: f64,
}

impl Default for DpConfig {
    fn default() -> Self {
        DpConfig {
            lambda: DEFAULT_DP_LAMBDA,
            min_ratio: 0.5,
            max_ratio: 2.0,
        }
    }
}

/// Dynamic-programming beat tracking with the default [`DpConfig`].
pub fn dp_track(act: &ActivationFunction, global_tempo: f64) -> Result<BeatSequence> {
    dp_track_with(act, global_tempo, &DpConfig::default())
}

/// Dynamic-programming beat tracking around a fixed tempo.
///
/// With period `τ = fps · 60 / tempo` frames, the score of frame `n` is its
/// activation plus the best `score(p) - λ (ln((n - p) / τ))²` over
/// predecessors with `n - p` in `[τ/2, 2τ]`. A frame whose best predecessor
/// score is not positive starts a new path. The beats are the backtrace
/// from the highest-scoring frame.
pub fn dp_track_with(
    act: &ActivationFunction,
    global_tempo: f64,
    config: &DpConfig,
) -> Result<BeatSequence> {
    if !(global_tempo.is_finite() && global_tempo > 0.0) {
        return Err(Error::InvalidParams(format!(
            "global tempo must be > 0, got {global_tempo}"
        )));
    }
    let period = act.fps() * 60.0 / global_tempo;
    if period.is_nan() || period < 2.0 {
        return Err(Error::DegenerateTempo {
            period_frames: period,
        });
    }
    let values = act.values();
    let n = values.len();
    if n == 0 {
        return Ok(BeatSequence::empty());
    }

    let min_gap = ((config.min_ratio * period).ceil() as usize).max(1);
    let max_gap = (config.max_ratio * period).floor() as usize;
    let penalty: Vec<f64> = (0..=max_gap)
        .map(|d| config.lambda * (d as f64 / period).ln().powi(2))
        .collect();

    let mut score = vec![0.0; n];
    let mut back: Vec<Option<usize>> = vec![None; n];
    for t in 0..n {
        let mut best: Option<(f64, usize)> = None;
        if t >= min_gap {
            let lo = t.saturating_sub(max_gap);
            for p in lo..=t - min_gap {
                let s = score[p] - penalty[t - p];
                if best.is_none_or(|(b, _)| s > b) {
                    best = Some((s, p));
                }
            }
        }
        match best {
            Some((s, p)) if s > 0.0 => {
                score[t] = values[t] + s;
                back[t] = Some(p);
            }
            _ => score[t] = values[t],
        }
    }

    let mut frame = (0..n).fold(0, |best, t| if score[t] > score[best] { t } else { best });
    let mut frames = vec![frame];
    while let Some(p) = back[frame] {
        frames.push(p);
        frame = p;
    }
    frames.reverse();
    let times = frames.into_iter().map(|f| act.frame_time(f)).collect();
    Ok(BeatSequence::new(times).expect("backtrace frames are increasing"))
}

/// `60 / mean IBI` of the reference beats, in BPM.
pub fn global_tempo_from_reference(beats: &BeatSequence) -> Result<f64> {
    crate::metrics::mean_track_tempo(beats)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn act(fps: f64, values: Vec<f64>) -> ActivationFunction {
        ActivationFunction::new(fps, values).unwrap()
    }

    #[test]
    fn sppk_zeros() {
        assert!(sppk(&act(100.0, vec![0.0; 300]), 0.3, 0.15).is_empty());
    }

    #[test]
    fn sppk_single_triangle() {
        let v: Vec<f64> = (0..100)
            .map(|n| (1.0 - (n as f64 - 50.0).abs() / 10.0).max(0.0))
            .collect();
        assert_eq!(sppk(&act(100.0, v), 0.3, 0.15).times(), &[0.5]);
    }

    #[test]
    fn sppk_suppresses_weaker_neighbour() {
        let mut v = vec![0.0; 100];
        v[40] = 0.8;
        v[45] = 0.9;
        assert_eq!(sppk(&act(100.0, v), 0.3, 0.1).times(), &[0.45]);
    }

    #[test]
    fn sppk_threshold_and_plateau() {
        let mut v = vec![0.0; 20];
        v[3] = 0.2;
        v[8] = 0.6;
        v[9] = 0.6;
        v[10] = 0.6;
        assert_eq!(local_maxima(&v, 0.3), vec![9]);
        // rising plateau into a higher value is not a peak
        let w = vec![0.0, 0.5, 0.5, 0.7, 0.0];
        assert_eq!(local_maxima(&w, 0.0), vec![3]);
    }

    #[test]
    fn global_tempo_examples() {
        let b = BeatSequence::new(vec![0.0, 0.5, 1.0, 1.5]).unwrap();
        assert!((global_tempo_from_reference(&b).unwrap() - 120.0).abs() < 1e-9);
        let b = BeatSequence::new(vec![0.0, 0.4, 1.0]).unwrap();
        assert!((global_tempo_from_reference(&b).unwrap() - 120.0).abs() < 1e-9);
        let b = BeatSequence::new(vec![0.0]).unwrap();
        assert!(matches!(
            global_tempo_from_reference(&b),
            Err(Error::TooFewBeats { .. })
        ));
    }

    #[test]
    fn dp_degenerate_tempo() {
        let a = act(10.0, vec![0.0; 50]);
        // 400 BPM at 10 fps is 1.5 frames per beat
        assert!(matches!(
            dp_track(&a, 400.0),
            Err(Error::DegenerateTempo { .. })
        ));
    }

    #[test]
    fn dp_recovers_clean_impulses() {
        let mut v = vec![0.0; 1000];
        for f in (20..1000).step_by(50) {
            v[f] = 1.0;
        }
        let beats = dp_track(&act(100.0, v), 120.0).unwrap();
        let want: Vec<f64> = (20..1000).step_by(50).map(|f| f as f64 / 100.0).collect();
        assert_eq!(beats.times(), want.as_slice());
    }

    /// Objective of a beat path: activations minus transition penalties.
    fn path_objective(values: &[f64], path: &[usize], period: f64, lambda: f64) -> f64 {
        let gains: f64 = path.iter().map(|&f| values[f]).sum();
        let costs: f64 = path
            .windows(2)
            .map(|w| lambda * ((w[1] - w[0]) as f64 / period).ln().powi(2))
            .sum();
        gains - costs
    }

    /// Best objective over every subset of frames with admissible gaps.
    fn brute_best(values: &[f64], period: f64, lambda: f64) -> f64 {
        let n = values.len();
        let (lo, hi) = (
            (0.5 * period).ceil() as usize,
            (2.0 * period).floor() as usize,
        );
        let mut best = f64::NEG_INFINITY;
        for mask in 1u32..(1 << n) {
            let path: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
            if path.windows(2).all(|w| (lo..=hi).contains(&(w[1] - w[0]))) {
                best = best.max(path_objective(values, &path, period, lambda));
            }
        }
        best
    }

    #[test]
    fn dp_matches_exhaustive_search() {
        let layouts: [Vec<f64>; 3] = [
            vec![
                0.0, 0.9, 0.1, 0.0, 0.2, 0.8, 0.0, 0.1, 0.0, 0.7, 0.3, 0.0, 0.0, 0.9, 0.0, 0.0,
            ],
            vec![0.5; 16],
            vec![
                0.1, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.6, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.4,
            ],
        ];
        // 4 frames per beat at 10 fps
        let (fps, tempo, lambda) = (10.0, 150.0, 1.0);
        for values in layouts {
            let a = act(fps, values.clone());
            let config = DpConfig {
                lambda,
                ..DpConfig::default()
            };
            let beats = dp_track_with(&a, tempo, &config).unwrap();
            let path: Vec<usize> = beats
                .times()
                .iter()
                .map(|t| (t * fps).round() as usize)
                .collect();
            let got = path_objective(&values, &path, 4.0, lambda);
            let want = brute_best(&values, 4.0, lambda);
            assert!((got - want).abs() < 1e-9, "dp {got} vs exhaustive {want}");
        }
    }

    #[test]
    fn dp_constant_activation_keeps_tempo() {
        let a = act(100.0, vec![0.5; 2000]);
        let beats = dp_track(&a, 100.0).unwrap();
        let target = 60.0 / 100.0;
        assert!(beats.len() > 10);
        for ibi in beats.intervals() {
            assert!((ibi - target).abs() <= 0.175 * target, "ibi {ibi}");
        }
    }
}
