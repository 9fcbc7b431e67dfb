//! Modified reference windows for every instance and metric-level
//! condition.
//!
//! A window starting at reference index `i` is built from the reference
//! beats that follow it:
//!
//! * subharmonic (stride `d`, `d = 1` is onbeat): `b_i, b_{i+d}, ..., b_{i+d(L-1)}`
//! * harmonic (factor `h`): the anchors `b_i..b_{i+L-1}` with `h - 1` evenly
//!   spaced points inserted into each interval, `L + (h-1)(L-1)` times total
//! * offbeat (fraction `f`): `b_m + f (b_{m+1} - b_m)` for `m = i..i+L-1`
//!
//! Windows that would run past the end of the reference do not exist.

use crate::error::{Error, Result};
use crate::types::{BeatSequence, Condition, MetricLevel, ToleranceParams};

/// One modified reference subsequence and the reference beats it credits.
#[derive(Debug, Clone, PartialEq)]
pub struct VariantWindow {
    pub condition: Condition,
    /// Reference index the window starts from (0-based).
    pub instance: usize,
    pub times: Vec<f64>,
    /// Matching tolerance, seconds.
    pub epsilon: f64,
    /// Reference indices marked covered when the window matches.
    pub cover_set: Vec<usize>,
}

impl VariantWindow {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Offbeat phase as a fraction of the local interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Offbeat {
    Half,
    OneThird,
    TwoThird,
}

impl Offbeat {
    pub fn fraction(self) -> f64 {
        match self {
            Offbeat::Half => 0.5,
            Offbeat::OneThird => 1.0 / 3.0,
            Offbeat::TwoThird => 2.0 / 3.0,
        }
    }

    pub fn condition(self) -> Condition {
        match self {
            Offbeat::Half => Condition::OffbeatHalf,
            Offbeat::OneThird => Condition::OffbeatOneThird,
            Offbeat::TwoThird => Condition::OffbeatTwoThird,
        }
    }
}

/// `min(cap, gamma * mean consecutive difference of times)`.
pub fn adaptive_epsilon(times: &[f64], params: &ToleranceParams) -> Result<f64> {
    if times.len() < 2 {
        return Err(Error::WindowTooShort);
    }
    let mean_ibi = times.windows(2).map(|w| w[1] - w[0]).sum::<f64>() / (times.len() - 1) as f64;
    Ok(params.cap.min(params.gamma * mean_ibi))
}

/// Length of a harmonic window with `context_len` anchors and factor `h`.
pub fn harmonic_window_len(context_len: usize, factor: usize) -> usize {
    context_len + (factor - 1) * (context_len - 1)
}

/// Every `stride`-th beat from `instance`; `stride` 1..=4 selects onbeat,
/// half, third or quarter tempo.
pub fn subharmonic_variant(
    beats: &BeatSequence,
    instance: usize,
    stride: usize,
    params: &ToleranceParams,
) -> Option<VariantWindow> {
    let condition = match stride {
        1 => Condition::Onbeat,
        2 => Condition::SubharmonicHalf,
        3 => Condition::SubharmonicThird,
        4 => Condition::SubharmonicQuarter,
        _ => return None,
    };
    let l = params.context_len;
    let last = instance + stride * (l - 1);
    if last >= beats.len() {
        return None;
    }
    let t = beats.times();
    let cover_set: Vec<usize> = (0..l).map(|k| instance + stride * k).collect();
    let times = cover_set.iter().map(|&k| t[k]).collect();
    finish(condition, instance, times, cover_set, params)
}

/// Anchors `b_i..b_{i+L-1}` upsampled by linear interpolation; `factor`
/// 2..=4 selects double, triple or quadruple tempo.
pub fn harmonic_variant(
    beats: &BeatSequence,
    instance: usize,
    factor: usize,
    params: &ToleranceParams,
) -> Option<VariantWindow> {
    let condition = match factor {
        2 => Condition::HarmonicDouble,
        3 => Condition::HarmonicTriple,
        4 => Condition::HarmonicQuadruple,
        _ => return None,
    };
    let l = params.context_len;
    if instance + l > beats.len() {
        return None;
    }
    let t = beats.times();
    let mut times = Vec::with_capacity(harmonic_window_len(l, factor));
    for m in instance..instance + l - 1 {
        let (start, span) = (t[m], t[m + 1] - t[m]);
        times.push(start);
        for q in 1..factor {
            times.push(start + span * (q as f64 / factor as f64));
        }
    }
    times.push(t[instance + l - 1]);
    let cover_set = (instance..instance + l).collect();
    finish(condition, instance, times, cover_set, params)
}

/// Points at `fraction` of each of the `L` intervals starting at `instance`.
/// Needs `b_{i+L}` to exist.
pub fn offbeat_variant(
    beats: &BeatSequence,
    instance: usize,
    offbeat: Offbeat,
    params: &ToleranceParams,
) -> Option<VariantWindow> {
    let l = params.context_len;
    if instance + l >= beats.len() {
        return None;
    }
    let t = beats.times();
    let frac = offbeat.fraction();
    let times = (instance..instance + l)
        .map(|m| t[m] + frac * (t[m + 1] - t[m]))
        .collect();
    let cover_set = (instance..instance + l).collect();
    finish(offbeat.condition(), instance, times, cover_set, params)
}

/// Builds the window for any condition.
pub fn variant(
    beats: &BeatSequence,
    instance: usize,
    condition: Condition,
    params: &ToleranceParams,
) -> Option<VariantWindow> {
    match condition.level() {
        MetricLevel::Subsample(d) => subharmonic_variant(beats, instance, d, params),
        MetricLevel::Interpolate(h) => harmonic_variant(beats, instance, h, params),
        MetricLevel::Offset(_) => {
            let offbeat = match condition {
                Condition::OffbeatHalf => Offbeat::Half,
                Condition::OffbeatOneThird => Offbeat::OneThird,
                _ => Offbeat::TwoThird,
            };
            offbeat_variant(beats, instance, offbeat, params)
        }
    }
}

/// All non-empty windows, ordered by instance and then by condition.
pub fn all_variants(beats: &BeatSequence, params: &ToleranceParams) -> Vec<VariantWindow> {
    (0..beats.len())
        .flat_map(|i| {
            Condition::ALL
                .into_iter()
                .filter_map(move |c| variant(beats, i, c, params))
        })
        .collect()
}

fn finish(
    condition: Condition,
    instance: usize,
    times: Vec<f64>,
    cover_set: Vec<usize>,
    params: &ToleranceParams,
) -> Option<VariantWindow> {
    // context_len >= 2 guarantees at least two times
    let epsilon = adaptive_epsilon(&times, params).ok()?;
    Some(VariantWindow {
        condition,
        instance,
        times,
        epsilon,
        cover_set,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn seq(t: &[f64]) -> BeatSequence {
        BeatSequence::new(t.to_vec()).unwrap()
    }

    fn params(l: usize) -> ToleranceParams {
        ToleranceParams::default().with_context_len(l).unwrap()
    }

    fn eight() -> BeatSequence {
        seq(&[0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5])
    }

    #[test]
    fn half_tempo_subsamples_every_other_beat() {
        let w = subharmonic_variant(&eight(), 0, 2, &params(3)).unwrap();
        assert_eq!(w.times, vec![0.0, 1.0, 2.0]);
        assert_eq!(w.cover_set, vec![0, 2, 4]);
        assert_eq!(w.condition, Condition::SubharmonicHalf);
    }

    #[test]
    fn quarter_tempo_is_empty_on_eight_beats() {
        assert!(subharmonic_variant(&eight(), 0, 4, &params(3)).is_none());
    }

    #[test]
    fn onbeat_is_identity() {
        let w = subharmonic_variant(&seq(&[0.0, 0.5, 1.0]), 0, 1, &params(3)).unwrap();
        assert_eq!(w.times, vec![0.0, 0.5, 1.0]);
        assert_eq!(w.cover_set, vec![0, 1, 2]);
    }

    #[test]
    fn harmonic_lengths_and_values() {
        let b = seq(&[0.0, 1.0, 2.0]);
        let w = harmonic_variant(&b, 0, 2, &params(3)).unwrap();
        assert_eq!(w.len(), 5);
        assert_eq!(w.times, vec![0.0, 0.5, 1.0, 1.5, 2.0]);
        assert_eq!(w.cover_set, vec![0, 1, 2]);

        let w = harmonic_variant(&seq(&[0.0, 0.9, 2.1]), 0, 3, &params(2)).unwrap();
        assert_eq!(w.len(), 4);
        for (got, want) in w.times.iter().zip([0.0, 0.3, 0.6, 0.9]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
        }
        assert!(harmonic_variant(&b, 1, 2, &params(3)).is_none());
    }

    #[test]
    fn offbeat_values_and_boundary() {
        let b = seq(&[0.0, 1.0, 2.0]);
        let w = offbeat_variant(&b, 0, Offbeat::Half, &params(2)).unwrap();
        assert_eq!(w.times, vec![0.5, 1.5]);
        assert_eq!(w.cover_set, vec![0, 1]);
        let w = offbeat_variant(&b, 0, Offbeat::OneThird, &params(2)).unwrap();
        assert_abs_diff_eq!(w.times[0], 1.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(w.times[1], 4.0 / 3.0, epsilon = 1e-15);
        assert!(offbeat_variant(&seq(&[0.0, 1.0]), 0, Offbeat::Half, &params(2)).is_none());
    }

    #[test]
    fn epsilon_examples() {
        let p = ToleranceParams::default();
        assert_abs_diff_eq!(
            adaptive_epsilon(&[0.0, 0.25], &p).unwrap(),
            0.04375,
            epsilon = 1e-15
        );
        assert_eq!(adaptive_epsilon(&[0.0, 0.5], &p).unwrap(), 0.070);
        assert_abs_diff_eq!(
            adaptive_epsilon(&[0.0, 0.4], &p).unwrap(),
            0.070,
            epsilon = 1e-15
        );
        assert!(matches!(
            adaptive_epsilon(&[1.0], &p),
            Err(Error::WindowTooShort)
        ));
    }

    #[test]
    fn two_beats_give_onbeat_and_harmonics() {
        let ws = all_variants(&seq(&[0.0, 0.5]), &params(2));
        let conds: Vec<_> = ws.iter().map(|w| w.condition).collect();
        assert_eq!(
            conds,
            vec![
                Condition::Onbeat,
                Condition::HarmonicDouble,
                Condition::HarmonicTriple,
                Condition::HarmonicQuadruple
            ]
        );
    }

    #[test]
    fn quarter_windows_on_nine_beats() {
        let b = seq(&(0..9).map(|k| k as f64 * 0.5).collect::<Vec<_>>());
        let inst: Vec<_> = all_variants(&b, &params(2))
            .into_iter()
            .filter(|w| w.condition == Condition::SubharmonicQuarter)
            .map(|w| w.instance)
            .collect();
        assert_eq!(inst, vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn no_quarter_windows_on_eight_beats_with_l3() {
        assert!(all_variants(&eight(), &params(3))
            .iter()
            .all(|w| w.condition != Condition::SubharmonicQuarter));
    }

    #[test]
    fn constant_tempo_epsilon_ordering() {
        let b = seq(&(0..40).map(|k| k as f64 * 0.3).collect::<Vec<_>>());
        let p = params(3);
        let eps = |c| variant(&b, 0, c, &p).unwrap().epsilon;
        assert!(eps(Condition::HarmonicQuadruple) <= eps(Condition::HarmonicTriple));
        assert!(eps(Condition::HarmonicTriple) <= eps(Condition::HarmonicDouble));
        assert!(eps(Condition::HarmonicDouble) <= eps(Condition::Onbeat));
        assert!(eps(Condition::Onbeat) <= eps(Condition::SubharmonicHalf));
        assert!(eps(Condition::SubharmonicHalf) <= eps(Condition::SubharmonicQuarter));
    }
}
