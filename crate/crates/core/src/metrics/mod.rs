//! Scalar evaluation metrics and the per-track report.

mod acr;
mod continuity;
mod fmeasure;
mod tempo;

use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use acr::{acr_scores, mlsr, switch_count, AcrScores};
pub use continuity::{
    amlt, amlt_variants, cmlt, continuity, continuity_correct, continuity_score, Continuity,
};
pub use fmeasure::{f1_score, l_correct_fmeasure, matched_pairs, FMeasure, LCorrectScores};
pub use tempo::{
    mean_track_tempo, stable_tempi_counts, stable_tempi_percentage, STABLE_TEMPO_TOLERANCE,
};

use crate::error::{Error, Result};
use crate::matching;
use crate::types::{BeatSequence, Condition, ToleranceParams};

/// Which metric families to compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MetricSet {
    pub f_measure: bool,
    pub continuity: bool,
    pub l_correct: bool,
    pub acr: bool,
}

impl MetricSet {
    pub fn all() -> Self {
        MetricSet {
            f_measure: true,
            continuity: true,
            l_correct: true,
            acr: true,
        }
    }

    fn none() -> Self {
        MetricSet {
            f_measure: false,
            continuity: false,
            l_correct: false,
            acr: false,
        }
    }
}

impl Default for MetricSet {
    fn default() -> Self {
        Self::all()
    }
}

impl FromStr for MetricSet {
    type Err = Error;

    /// Comma-separated list, e.g. `f1,cmlt,acr`. `all` selects everything.
    fn from_str(s: &str) -> Result<Self> {
        let mut set = MetricSet::none();
        for item in s.split(',').map(str::trim).filter(|x| !x.is_empty()) {
            match item.to_ascii_lowercase().as_str() {
                "all" => set = MetricSet::all(),
                "f1" | "f" | "fmeasure" => set.f_measure = true,
                "cmlt" | "amlt" | "continuity" => set.continuity = true,
                "lcorrect" | "l_correct" | "fl" => set.l_correct = true,
                "acr" | "mlsr" => set.acr = true,
                other => {
                    return Err(Error::InvalidParams(format!("unknown metric `{other}`")));
                }
            }
        }
        if set == MetricSet::none() {
            return Err(Error::InvalidParams("metric list is empty".into()));
        }
        Ok(set)
    }
}

/// Coverage ratios together with the switching ratio.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcrReport {
    #[serde(flatten)]
    pub scores: AcrScores,
    pub mlsr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrackReport {
    pub track_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f_measure: Option<FMeasure>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub continuity: Option<Continuity>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l_correct: Option<LCorrectScores>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub acr: Option<AcrReport>,
    pub params: ToleranceParams,
}

impl TrackReport {
    /// Every scalar in the report under a stable name, in a fixed order.
    pub fn scalars(&self) -> Vec<(String, f64)> {
        let mut out = Vec::new();
        if let Some(f) = &self.f_measure {
            out.push(("f1".into(), f.f1));
            out.push(("precision".into(), f.precision));
            out.push(("recall".into(), f.recall));
        }
        if let Some(c) = &self.continuity {
            out.push(("cmlt".into(), c.cmlt));
            out.push(("amlt".into(), c.amlt));
        }
        if let Some(l) = &self.l_correct {
            out.push(("l_correct_f".into(), l.f_measure));
            out.push(("l_correct_p".into(), l.precision));
            out.push(("l_correct_r".into(), l.recall));
        }
        if let Some(a) = &self.acr {
            out.push(("acr_any".into(), a.scores.any));
            out.push(("acr_offbeat".into(), a.scores.offbeat));
            for c in Condition::ALL {
                out.push((format!("acr_{}", c.name()), a.scores.get(c)));
            }
            out.push(("mlsr".into(), a.mlsr));
        }
        out
    }
}

/// Computes the selected metrics for one reference/estimate pair.
pub fn evaluate_track(
    track_id: &str,
    reference: &BeatSequence,
    est: &BeatSequence,
    params: &ToleranceParams,
    metrics: MetricSet,
) -> Result<TrackReport> {
    params.validate()?;
    let needed = if metrics.l_correct {
        params.context_len
    } else {
        2
    };
    if reference.len() < needed {
        return Err(Error::TooFewBeats {
            needed,
            got: reference.len(),
        });
    }
    let acr = if metrics.acr {
        let cm = matching::coverage_matrix(reference, est, params)?;
        Some(AcrReport {
            scores: acr_scores(&cm),
            mlsr: mlsr(&cm),
        })
    } else {
        None
    };
    Ok(TrackReport {
        track_id: track_id.to_owned(),
        f_measure: metrics
            .f_measure
            .then(|| f1_score(reference, est, params.cap)),
        continuity: metrics
            .continuity
            .then(|| continuity(reference, est, params.gamma)),
        l_correct: metrics
            .l_correct
            .then(|| l_correct_fmeasure(reference, est, params)),
        acr,
        params: *params,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn metric_list_parsing() {
        assert_eq!("all".parse::<MetricSet>().unwrap(), MetricSet::all());
        let s: MetricSet = "f1, acr".parse().unwrap();
        assert!(s.f_measure && s.acr && !s.continuity && !s.l_correct);
        assert!("".parse::<MetricSet>().is_err());
        assert!("bogus".parse::<MetricSet>().is_err());
    }

    #[test]
    fn identity_track_report() {
        let r = BeatSequence::new((0..30).map(|k| k as f64 * 0.45).collect()).unwrap();
        let rep =
            evaluate_track("t", &r, &r, &ToleranceParams::default(), MetricSet::all()).unwrap();
        for (name, v) in rep.scalars() {
            let want = match name.as_str() {
                "f1" | "precision" | "recall" | "cmlt" | "amlt" | "l_correct_f" | "l_correct_p"
                | "l_correct_r" | "acr_any" | "acr_onbeat" => 1.0,
                "mlsr" => 0.0,
                _ => continue,
            };
            assert_eq!(v, want, "{name}");
        }
    }

    #[test]
    fn report_json_skips_unselected() {
        let r = BeatSequence::new(vec![0.0, 0.5, 1.0]).unwrap();
        let rep = evaluate_track(
            "x",
            &r,
            &r,
            &ToleranceParams::default(),
            "f1".parse().unwrap(),
        )
        .unwrap();
        let json = serde_json::to_string(&rep).unwrap();
        assert!(json.contains("f_measure"));
        assert!(!json.contains("acr"));
        let back: TrackReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, rep);
    }
}
