//! Annotation coverage ratios and the metric-level switching ratio.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::types::{Condition, CoverageMatrix};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcrScores {
    pub per_condition: BTreeMap<Condition, f64>,
    pub any: f64,
    pub offbeat: f64,
}

impl AcrScores {
    pub fn get(&self, condition: Condition) -> f64 {
        self.per_condition.get(&condition).copied().unwrap_or(0.0)
    }
}

fn ratio(row: &[bool]) -> f64 {
    if row.is_empty() {
        0.0
    } else {
        row.iter().filter(|&&b| b).count() as f64 / row.len() as f64
    }
}

/// Fraction of reference beats covered per condition and for the two
/// union rows.
pub fn acr_scores(cm: &CoverageMatrix) -> AcrScores {
    AcrScores {
        per_condition: Condition::ALL
            .into_iter()
            .map(|c| (c, ratio(cm.row(c))))
            .collect(),
        any: ratio(cm.any_row()),
        offbeat: ratio(cm.offbeat_row()),
    }
}

/// Covered beats whose condition set is disjoint from that of the
/// previous covered beat, over all covered beats. 0 when nothing is
/// covered.
pub fn mlsr(cm: &CoverageMatrix) -> f64 {
    switch_count(cm).map_or(0.0, |(switches, covered)| switches as f64 / covered as f64)
}

/// `(switches, covered)`, `None` when no beat is covered.
pub fn switch_count(cm: &CoverageMatrix) -> Option<(usize, usize)> {
    let mut previous: Option<u16> = None;
    let mut switches = 0;
    let mut covered = 0;
    for k in 0..cm.n_beats() {
        let mask = cm.condition_mask(k);
        if mask == 0 {
            continue;
        }
        covered += 1;
        if matches!(previous, Some(p) if p & mask == 0) {
            switches += 1;
        }
        previous = Some(mask);
    }
    (covered > 0).then_some((switches, covered))
}
