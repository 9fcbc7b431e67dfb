//! Window matching against estimated beats and coverage assembly.
//!
//! A window of length `n` matches at `j` when `|w[τ] - est[j+τ]| <= ε` for
//! every `τ < n`. The estimated beats used are consecutive, so a spurious
//! or missing estimate inside the span breaks the match.

use std::ops::Range;

use crate::error::{Error, Result};
use crate::par;
use crate::types::{BeatSequence, Condition, CoverageMatrix, ToleranceParams};
use crate::variants::{self, Offbeat, VariantWindow};

/// Indices `j` with `|est[j] - t| <= eps`.
fn candidates(est: &[f64], t: f64, eps: f64) -> Range<usize> {
    let lo = est.partition_point(|&x| t - x > eps);
    let hi = est.partition_point(|&x| x - t <= eps);
    lo..hi.max(lo)
}

fn matches_at(times: &[f64], est: &[f64], j: usize, eps: f64) -> bool {
    j + times.len() <= est.len()
        && times
            .iter()
            .zip(&est[j..])
            .all(|(w, e)| (w - e).abs() <= eps)
}

/// Every start index at which `times` matches `est` within `eps`.
pub fn matches_with_epsilon<'a>(
    times: &'a [f64],
    est: &'a [f64],
    eps: f64,
) -> impl Iterator<Item = usize> + 'a {
    let range = match times.first() {
        Some(&t0) => candidates(est, t0, eps),
        None => 0..0,
    };
    range.filter(move |&j| matches_at(times, est, j, eps))
}

/// Smallest `j` at which the window matches, or `None`.
pub fn window_match(window: &VariantWindow, est: &BeatSequence) -> Option<usize> {
    matches_with_epsilon(&window.times, est.times(), window.epsilon).next()
}

fn check_reference(reference: &BeatSequence, params: &ToleranceParams) -> Result<()> {
    params.validate()?;
    if reference.len() < 2 {
        return Err(Error::TooFewBeats {
            needed: 2,
            got: reference.len(),
        });
    }
    Ok(())
}

fn assemble(n_beats: usize, hits: Vec<(Condition, Vec<usize>)>) -> CoverageMatrix {
    let mut rows: [Vec<bool>; 10] = std::array::from_fn(|_| vec![false; n_beats]);
    for (condition, cover) in hits {
        let row = &mut rows[condition.index()];
        for k in cover {
            row[k] = true;
        }
    }
    CoverageMatrix::from_rows(rows).expect("rows share n_beats")
}

/// Coverage of every reference beat under all ten conditions.
///
/// Runs window matching on the rayon pool when the `parallel` feature is
/// enabled; the result does not depend on scheduling.
pub fn coverage_matrix(
    reference: &BeatSequence,
    est: &BeatSequence,
    params: &ToleranceParams,
) -> Result<CoverageMatrix> {
    check_reference(reference, params)?;
    let windows = variants::all_variants(reference, params);
    let hits = par::filter_map(&windows, |w| {
        window_match(w, est).map(|_| (w.condition, w.cover_set.clone()))
    });
    Ok(assemble(reference.len(), hits))
}

/// Single-threaded [`coverage_matrix`], kept for benchmarking and as a
/// reference path.
pub fn coverage_matrix_sequential(
    reference: &BeatSequence,
    est: &BeatSequence,
    params: &ToleranceParams,
) -> Result<CoverageMatrix> {
    check_reference(reference, params)?;
    let hits = variants::all_variants(reference, params)
        .into_iter()
        .filter(|w| window_match(w, est).is_some())
        .map(|w| (w.condition, w.cover_set))
        .collect();
    Ok(assemble(reference.len(), hits))
}

/// Per-beat flags from classic L-correct detection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LCorrectFlags {
    pub reference: Vec<bool>,
    pub estimate: Vec<bool>,
}

/// L-correct detection over onbeat and half-offbeat windows with the fixed
/// tolerance `params.cap`.
///
/// Reference flags come from the cover sets of matched windows; an
/// estimate is flagged when it takes part in any match.
pub fn l_correct_detection(
    reference: &BeatSequence,
    est: &BeatSequence,
    params: &ToleranceParams,
) -> LCorrectFlags {
    let mut flags = LCorrectFlags {
        reference: vec![false; reference.len()],
        estimate: vec![false; est.len()],
    };
    for i in 0..reference.len() {
        let windows = [
            variants::subharmonic_variant(reference, i, 1, params),
            variants::offbeat_variant(reference, i, Offbeat::Half, params),
        ];
        for w in windows.into_iter().flatten() {
            let n = w.len();
            let mut matched = false;
            for j in matches_with_epsilon(&w.times, est.times(), params.cap) {
                matched = true;
                flags.estimate[j..j + n].iter_mut().for_each(|f| *f = true);
            }
            if matched {
                for k in w.cover_set {
                    flags.reference[k] = true;
                }
            }
        }
    }
    flags
}
