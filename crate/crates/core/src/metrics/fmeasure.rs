use serde::{Deserialize, Serialize};

use crate::matching;
use crate::types::{BeatSequence, ToleranceParams};

/// Precision, recall and their harmonic mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FMeasure {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl FMeasure {
    pub fn from_pr(precision: f64, recall: f64) -> Self {
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        FMeasure {
            precision,
            recall,
            f1,
        }
    }
}

/// Number of one-to-one pairs with `|ref - est| <= window`.
///
/// Greedy in time order: each estimate takes the earliest unused reference
/// inside its window. All windows share one width, so this is a maximum
/// matching.
pub fn matched_pairs(reference: &[f64], est: &[f64], window: f64) -> usize {
    let mut r = 0;
    let mut matched = 0;
    for &e in est {
        while r < reference.len() && e - reference[r] > window {
            r += 1;
        }
        if r < reference.len() && (reference[r] - e).abs() <= window {
            matched += 1;
            r += 1;
        }
    }
    matched
}

/// F-measure with a fixed tolerance window (seconds). Empty inputs score 0.
pub fn f1_score(reference: &BeatSequence, est: &BeatSequence, window: f64) -> FMeasure {
    if reference.is_empty() || est.is_empty() {
        return FMeasure::from_pr(0.0, 0.0);
    }
    let hits = matched_pairs(reference.times(), est.times(), window) as f64;
    FMeasure::from_pr(hits / est.len() as f64, hits / reference.len() as f64)
}

/// L-correct recall, precision and F-measure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LCorrectScores {
    pub recall: f64,
    pub precision: f64,
    pub f_measure: f64,
}

pub fn l_correct_fmeasure(
    reference: &BeatSequence,
    est: &BeatSequence,
    params: &ToleranceParams,
) -> LCorrectScores {
    let flags = matching::l_correct_detection(reference, est, params);
    let ratio = |v: &[bool]| {
        if v.is_empty() {
            0.0
        } else {
            v.iter().filter(|&&b| b).count() as f64 / v.len() as f64
        }
    };
    let fm = FMeasure::from_pr(ratio(&flags.estimate), ratio(&flags.reference));
    LCorrectScores {
        recall: fm.recall,
        precision: fm.precision,
        f_measure: fm.f1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn grid(n: usize, ibi: f64) -> BeatSequence {
        BeatSequence::new((0..n).map(|k| k as f64 * ibi).collect()).unwrap()
    }

    #[test]
    fn identity() {
        let r = grid(20, 0.5);
        let s = f1_score(&r, &r, 0.07);
        assert_eq!((s.precision, s.recall, s.f1), (1.0, 1.0, 1.0));
    }

    #[test]
    fn empty_estimate() {
        let s = f1_score(&grid(5, 0.5), &BeatSequence::empty(), 0.07);
        assert_eq!((s.precision, s.recall, s.f1), (0.0, 0.0, 0.0));
    }

    #[test]
    fn double_tempo() {
        // 21 references, 41 estimates: every reference found once
        let s = f1_score(&grid(21, 0.5), &grid(41, 0.25), 0.07);
        assert_abs_diff_eq!(s.recall, 1.0);
        assert_abs_diff_eq!(s.precision, 21.0 / 41.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.f1, 42.0 / 62.0, epsilon = 1e-12);
    }

    #[test]
    fn each_reference_used_once() {
        let r = BeatSequence::new(vec![1.0]).unwrap();
        let e = BeatSequence::new(vec![0.98, 1.02]).unwrap();
        let s = f1_score(&r, &e, 0.07);
        assert_eq!(s.recall, 1.0);
        assert_eq!(s.precision, 0.5);
    }

    #[test]
    fn l_correct_identity_and_half_tempo() {
        let r = grid(20, 0.5);
        let p = ToleranceParams::default();
        let s = l_correct_fmeasure(&r, &r, &p);
        assert_eq!((s.recall, s.precision, s.f_measure), (1.0, 1.0, 1.0));

        let half = BeatSequence::new(r.times().iter().step_by(2).copied().collect()).unwrap();
        let s = l_correct_fmeasure(&r, &half, &p);
        assert_eq!(s.f_measure, 0.0);
    }

    #[test]
    fn l_correct_offbeat_shift() {
        let r = grid(20, 0.5);
        let shifted = BeatSequence::new((0..19).map(|k| k as f64 * 0.5 + 0.25).collect()).unwrap();
        let s = l_correct_fmeasure(&r, &shifted, &ToleranceParams::default());
        assert_eq!(s.precision, 1.0);
        // the final reference beat has no following interval to anchor
        assert_abs_diff_eq!(s.recall, 19.0 / 20.0);
    }
}
