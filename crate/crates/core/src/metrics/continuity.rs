//! Continuity-based accuracy (CMLt) and its allowed-metrical-level
//! extension (AMLt).

use serde::{Deserialize, Serialize};

use crate::types::BeatSequence;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Continuity {
    pub cmlt: f64,
    pub amlt: f64,
}

fn nearest(reference: &[f64], t: f64) -> usize {
    let idx = reference.partition_point(|&x| x < t);
    if idx == 0 {
        0
    } else if idx == reference.len() || t - reference[idx - 1] <= reference[idx] - t {
        idx - 1
    } else {
        idx
    }
}

/// Reference interval ending at `i`; the first beat borrows the next one.
fn ref_interval(reference: &[f64], i: usize) -> f64 {
    if i == 0 {
        reference[1] - reference[0]
    } else {
        reference[i] - reference[i - 1]
    }
}

fn phase_ok(reference: &[f64], i: usize, t: f64, gamma: f64) -> bool {
    (reference[i] - t).abs() <= gamma * ref_interval(reference, i)
}

/// Marks each estimate that is continuity-correct.
///
/// An estimate is paired with its nearest reference beat `b_i` and must lie
/// within `gamma` times the local reference interval of it. Unless it is
/// the first estimate (or `b_i` is the first reference), its predecessor
/// must also lie within tolerance of `b_{i-1}` and the two intervals must
/// agree up to `gamma` times the reference interval.
pub fn continuity_correct(reference: &BeatSequence, est: &BeatSequence, gamma: f64) -> Vec<bool> {
    let r = reference.times();
    let e = est.times();
    if r.len() < 2 {
        return vec![false; e.len()];
    }
    (0..e.len())
        .map(|j| {
            let i = nearest(r, e[j]);
            if !phase_ok(r, i, e[j], gamma) {
                return false;
            }
            if j == 0 || i == 0 {
                return true;
            }
            let ref_ibi = r[i] - r[i - 1];
            phase_ok(r, i - 1, e[j - 1], gamma)
                && (ref_ibi - (e[j] - e[j - 1])).abs() <= gamma * ref_ibi
        })
        .collect()
}

/// Correct estimates over `max(|ref|, |est|)`.
pub fn continuity_score(reference: &BeatSequence, est: &BeatSequence, gamma: f64) -> f64 {
    let denom = reference.len().max(est.len());
    if denom == 0 || reference.len() < 2 {
        return 0.0;
    }
    let correct = continuity_correct(reference, est, gamma)
        .into_iter()
        .filter(|&c| c)
        .count();
    correct as f64 / denom as f64
}

pub fn cmlt(reference: &BeatSequence, est: &BeatSequence, gamma: f64) -> f64 {
    continuity_score(reference, est, gamma)
}

/// Whole-track reference variants scored by AMLt: onbeat, half offbeat,
/// half tempo (2 phases), third tempo (3 phases), double and triple tempo.
/// Variants with fewer than two beats are dropped.
pub fn amlt_variants(reference: &BeatSequence) -> Vec<BeatSequence> {
    let r = reference.times();
    let mut out = vec![r.to_vec()];
    out.push(r.windows(2).map(|w| w[0] + 0.5 * (w[1] - w[0])).collect());
    for stride in [2usize, 3] {
        for phase in 0..stride {
            out.push(r.iter().skip(phase).step_by(stride).copied().collect());
        }
    }
    for factor in [2usize, 3] {
        let mut up = Vec::with_capacity(r.len() * factor);
        for w in r.windows(2) {
            up.push(w[0]);
            for q in 1..factor {
                up.push(w[0] + (w[1] - w[0]) * (q as f64 / factor as f64));
            }
        }
        up.extend(r.last());
        out.push(up);
    }
    out.into_iter()
        .filter(|v| v.len() >= 2)
        .map(|v| BeatSequence::new(v).expect("variants of a valid sequence stay increasing"))
        .collect()
}

/// Best continuity score over [`amlt_variants`], one variant for the whole
/// track.
pub fn amlt(reference: &BeatSequence, est: &BeatSequence, gamma: f64) -> f64 {
    amlt_variants(reference)
        .iter()
        .map(|v| continuity_score(v, est, gamma))
        .fold(0.0, f64::max)
}

pub fn continuity(reference: &BeatSequence, est: &BeatSequence, gamma: f64) -> Continuity {
    Continuity {
        cmlt: cmlt(reference, est, gamma),
        amlt: amlt(reference, est, gamma),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const GAMMA: f64 = 0.175;

    fn seq(t: Vec<f64>) -> BeatSequence {
        BeatSequence::new(t).unwrap()
    }

    fn grid(n: usize, ibi: f64) -> BeatSequence {
        seq((0..n).map(|k| k as f64 * ibi).collect())
    }

    #[test]
    fn identity_all_correct() {
        let r = grid(30, 0.5);
        assert!(continuity_correct(&r, &r, GAMMA).iter().all(|&c| c));
        assert_eq!(cmlt(&r, &r, GAMMA), 1.0);
        assert_eq!(amlt(&r, &r, GAMMA), 1.0);
    }

    #[test]
    fn displaced_beat_fails_with_successor() {
        let r = grid(10, 0.5);
        let mut t = r.times().to_vec();
        t[4] += 0.3 * 0.5;
        let flags = continuity_correct(&r, &seq(t), GAMMA);
        let want: Vec<bool> = (0..10).map(|j| j != 4 && j != 5).collect();
        assert_eq!(flags, want);
    }

    #[test]
    fn double_tempo() {
        let r = grid(30, 0.5);
        let est = grid(59, 0.25);
        let flags = continuity_correct(&r, &est, GAMMA);
        // only the very first estimate survives on the phase check alone
        assert_eq!(flags.iter().filter(|&&c| c).count(), 1);
        assert!(cmlt(&r, &est, GAMMA) < 0.02);
        assert_eq!(amlt(&r, &est, GAMMA), 1.0);
    }

    #[test]
    fn half_tempo_each_phase() {
        let r = grid(30, 0.5);
        for phase in 0..2 {
            let est = seq(r.times().iter().skip(phase).step_by(2).copied().collect());
            assert_eq!(amlt(&r, &est, GAMMA), 1.0);
        }
    }

    #[test]
    fn offbeat_is_allowed() {
        let r = grid(30, 0.5);
        let est = seq((0..29).map(|k| k as f64 * 0.5 + 0.25).collect());
        assert_eq!(cmlt(&r, &est, GAMMA), 0.0);
        assert_eq!(amlt(&r, &est, GAMMA), 1.0);
    }

    #[test]
    fn switch_halfway_scores_about_half() {
        // onbeat over beats 0..20, double tempo over 20..40
        let r = grid(41, 0.5);
        let mut est: Vec<f64> = (0..20).map(|k| k as f64 * 0.5).collect();
        est.extend((0..41).map(|k| 10.0 + k as f64 * 0.25));
        let score = amlt(&r, &seq(est), GAMMA);
        assert!((score - 0.5).abs() < 0.05, "amlt = {score}");
    }

    #[test]
    fn amlt_never_below_cmlt() {
        let r = grid(20, 0.6);
        let est = seq(vec![0.05, 0.6, 1.1, 1.8, 2.4, 3.3, 3.6, 4.2]);
        assert!(amlt(&r, &est, GAMMA) >= cmlt(&r, &est, GAMMA));
    }

    #[test]
    fn empty_estimate_scores_zero() {
        assert_eq!(cmlt(&grid(5, 0.5), &BeatSequence::empty(), GAMMA), 0.0);
    }
}
