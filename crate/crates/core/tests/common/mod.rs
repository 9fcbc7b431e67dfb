#![allow(dead_code)]

use beatcov::synth::{gen_estimate, Scenario, Segment, TempoCurve};
use beatcov::{BeatSequence, Condition};
use rand::Rng;

pub fn grid(n: usize, ibi: f64, offset: f64) -> BeatSequence {
    BeatSequence::new((0..n).map(|k| offset + k as f64 * ibi).collect()).unwrap()
}

fn mean_diff(times: &[f64]) -> f64 {
    let mut sum = 0.0;
    for k in 1..times.len() {
        sum += times[k] - times[k - 1];
    }
    sum / (times.len() - 1) as f64
}

/// Window times and covered reference indices, built straight from the
/// definitions of each metric level.
fn oracle_window(b: &[f64], i: usize, c: Condition, l: usize) -> Option<(Vec<f64>, Vec<usize>)> {
    let n = b.len();
    let stride = match c {
        Condition::Onbeat => Some(1),
        Condition::SubharmonicHalf => Some(2),
        Condition::SubharmonicThird => Some(3),
        Condition::SubharmonicQuarter => Some(4),
        _ => None,
    };
    if let Some(d) = stride {
        let idx: Vec<usize> = (0..l).map(|k| i + d * k).collect();
        if *idx.last().unwrap() >= n {
            return None;
        }
        return Some((idx.iter().map(|&k| b[k]).collect(), idx));
    }
    let factor = match c {
        Condition::HarmonicDouble => Some(2),
        Condition::HarmonicTriple => Some(3),
        Condition::HarmonicQuadruple => Some(4),
        _ => None,
    };
    if let Some(h) = factor {
        if i + l > n {
            return None;
        }
        let mut w = Vec::new();
        for m in i..i + l - 1 {
            for q in 0..h {
                w.push(b[m] + (b[m + 1] - b[m]) * (q as f64 / h as f64));
            }
        }
        w.push(b[i + l - 1]);
        return Some((w, (i..i + l).collect()));
    }
    let f = match c {
        Condition::OffbeatHalf => 0.5,
        Condition::OffbeatOneThird => 1.0 / 3.0,
        _ => 2.0 / 3.0,
    };
    if i + l >= n {
        return None;
    }
    let w = (i..i + l).map(|m| b[m] + f * (b[m + 1] - b[m])).collect();
    Some((w, (i..i + l).collect()))
}

/// Quadratic brute-force coverage: every window against every start index.
/// Rows follow `Condition::ALL`.
pub fn oracle_coverage(b: &[f64], est: &[f64], cap: f64, gamma: f64, l: usize) -> Vec<Vec<bool>> {
    let mut rows = vec![vec![false; b.len()]; 10];
    for (r, &c) in Condition::ALL.iter().enumerate() {
        for i in 0..b.len() {
            let Some((w, cover)) = oracle_window(b, i, c, l) else {
                continue;
            };
            let eps = cap.min(gamma * mean_diff(&w));
            let hit = (0..est.len()).any(|j| {
                j + w.len() <= est.len() && (0..w.len()).all(|t| (w[t] - est[j + t]).abs() <= eps)
            });
            if hit {
                for k in cover {
                    rows[r][k] = true;
                }
            }
        }
    }
    rows
}

/// Reference with random inter-beat intervals in `[lo, hi)`.
pub fn random_reference(rng: &mut impl Rng, n: usize, lo: f64, hi: f64) -> BeatSequence {
    let mut t = rng.random_range(0.0..1.0);
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        out.push(t);
        t += rng.random_range(lo..hi);
    }
    BeatSequence::new(out).unwrap()
}

pub fn random_condition(rng: &mut impl Rng) -> Condition {
    Condition::ALL[rng.random_range(0..10)]
}

/// Scripted segments at random beats with random conditions and jitter.
pub fn random_segments(rng: &mut impl Rng, n_beats: usize, max_jitter: f64) -> Vec<Segment> {
    let mut starts = vec![0];
    for _ in 0..rng.random_range(0..4) {
        starts.push(rng.random_range(1..n_beats.max(2)));
    }
    starts.sort_unstable();
    starts.dedup();
    starts
        .into_iter()
        .filter(|&s| s < n_beats)
        .map(|start| Segment {
            start,
            condition: random_condition(rng),
            jitter_std: if rng.random_bool(0.5) {
                0.0
            } else {
                rng.random_range(0.0..max_jitter)
            },
        })
        .collect()
}

/// Estimate derived from `reference` by scripted segments, with occasional
/// spurious insertions and deletions.
pub fn random_estimate(
    rng: &mut impl Rng,
    reference: &BeatSequence,
    max_len: usize,
) -> BeatSequence {
    let mut scenario = Scenario::uniform(
        TempoCurve::constant(120.0).unwrap(),
        1.0,
        Condition::Onbeat,
        0.0,
    );
    scenario.segments = random_segments(rng, reference.len(), 0.03);
    let mut times = gen_estimate(reference, &scenario, rng.random())
        .unwrap()
        .into_inner();
    let end = reference.last().unwrap() + 1.0;
    for _ in 0..rng.random_range(0..3) {
        times.push(rng.random_range(0.0..end));
    }
    for _ in 0..rng.random_range(0..3) {
        if !times.is_empty() {
            let k = rng.random_range(0..times.len());
            times.remove(k);
        }
    }
    times.sort_by(f64::total_cmp);
    times.dedup();
    times.truncate(max_len);
    BeatSequence::new(times).unwrap()
}
