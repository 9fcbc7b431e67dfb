use crate::error::{Error, Result};
use crate::types::BeatSequence;

/// Relative half-width of the stable-tempo band.
pub const STABLE_TEMPO_TOLERANCE: f64 = 0.04;

fn require_two(beats: &BeatSequence) -> Result<f64> {
    beats.mean_ibi().ok_or(Error::TooFewBeats {
        needed: 2,
        got: beats.len(),
    })
}

/// `60 / mean IBI`, in BPM.
pub fn mean_track_tempo(beats: &BeatSequence) -> Result<f64> {
    Ok(60.0 / require_two(beats)?)
}

/// `(stable, total)` interval counts: local tempi `60 / IBI` divided by
/// the mean track tempo that fall inside `1 ± 4 %`.
pub fn stable_tempi_counts(beats: &BeatSequence) -> Result<(usize, usize)> {
    let mean = mean_track_tempo(beats)?;
    let (lo, hi) = (1.0 - STABLE_TEMPO_TOLERANCE, 1.0 + STABLE_TEMPO_TOLERANCE);
    let stable = beats
        .intervals()
        .map(|ibi| 60.0 / ibi / mean)
        .filter(|r| (lo..=hi).contains(r))
        .count();
    Ok((stable, beats.len() - 1))
}

/// Share of stable local tempi, as a ratio in `[0, 1]`.
pub fn stable_tempi_percentage(beats: &BeatSequence) -> Result<f64> {
    let (stable, total) = stable_tempi_counts(beats)?;
    Ok(stable as f64 / total as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn constant_tempo() {
        let b = BeatSequence::new((0..40).map(|k| k as f64 * 0.5).collect()).unwrap();
        assert_abs_diff_eq!(mean_track_tempo(&b).unwrap(), 120.0, epsilon = 1e-9);
        assert_eq!(stable_tempi_percentage(&b).unwrap(), 1.0);
    }

    #[test]
    fn alternating_intervals() {
        let mut t = vec![0.0];
        for k in 0..30 {
            let last = *t.last().unwrap();
            t.push(last + if k % 2 == 0 { 0.5 } else { 0.6 });
        }
        let b = BeatSequence::new(t).unwrap();
        // mean IBI 0.55 s: normalized tempi 1.1 and 0.917
        assert_eq!(stable_tempi_percentage(&b).unwrap(), 0.0);
    }

    #[test]
    fn single_interval() {
        let b = BeatSequence::new(vec![1.0, 1.5]).unwrap();
        assert_abs_diff_eq!(mean_track_tempo(&b).unwrap(), 120.0);
        assert!(mean_track_tempo(&BeatSequence::new(vec![1.0]).unwrap()).is_err());
    }
}
