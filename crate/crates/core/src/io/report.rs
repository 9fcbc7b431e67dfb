//! Dataset-level evaluation and the JSON report.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::formats::{parse_beats_file, write};
use crate::error::{Error, Result};
use crate::metrics::{self, MetricSet, TrackReport};
use crate::par;
use crate::types::{BeatSequence, ToleranceParams};

pub const SCHEMA_VERSION: u32 = 1;

/// Switch rule used for MLSR, recorded in every report.
pub const MLSR_RULE: &str =
    "a covered beat switches when its condition set is disjoint from that of the previous covered beat";

/// Dataset statistics in the style of a corpus description table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetStats {
    pub n_tracks: usize,
    /// Sum over tracks of the span from 0 to the last annotated beat, seconds.
    pub total_duration: f64,
    /// Share of all inter-beat intervals whose tempo lies within ±4 % of
    /// their track's mean tempo, in percent.
    pub percent_stable_tempi: f64,
    /// Unweighted mean of per-track mean tempi, BPM.
    pub mean_track_tempo: f64,
}

/// Pools interval counts across tracks; tracks with fewer than two beats
/// only contribute to the count and duration.
pub fn dataset_stats<'a>(references: impl IntoIterator<Item = &'a BeatSequence>) -> DatasetStats {
    let mut n_tracks = 0;
    let mut total_duration = 0.0;
    let (mut stable, mut intervals) = (0usize, 0usize);
    let mut tempi = Vec::new();
    for beats in references {
        n_tracks += 1;
        total_duration += beats.last().unwrap_or(0.0);
        if let (Ok(tempo), Ok((s, n))) = (
            metrics::mean_track_tempo(beats),
            metrics::stable_tempi_counts(beats),
        ) {
            tempi.push(tempo);
            stable += s;
            intervals += n;
        }
    }
    DatasetStats {
        n_tracks,
        total_duration,
        percent_stable_tempi: if intervals == 0 {
            0.0
        } else {
            100.0 * stable as f64 / intervals as f64
        },
        mean_track_tempo: if tempi.is_empty() {
            0.0
        } else {
            tempi.iter().sum::<f64>() / tempi.len() as f64
        },
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetReport {
    pub schema_version: u32,
    pub params: ToleranceParams,
    pub mlsr_rule: String,
    /// Sorted by `track_id`.
    pub tracks: Vec<TrackReport>,
    /// Unweighted per-track means keyed by metric name.
    pub means: BTreeMap<String, f64>,
    pub dataset_stats: DatasetStats,
    #[serde(default)]
    pub warnings: Vec<String>,
}

impl DatasetReport {
    /// Assembles a report from per-track results; `tracks` and
    /// `references` are paired by position.
    pub fn new(
        params: ToleranceParams,
        mut tracks: Vec<TrackReport>,
        references: &[BeatSequence],
        warnings: Vec<String>,
    ) -> Self {
        tracks.sort_by(|a, b| a.track_id.cmp(&b.track_id));
        DatasetReport {
            schema_version: SCHEMA_VERSION,
            params,
            mlsr_rule: MLSR_RULE.to_owned(),
            means: track_means(&tracks),
            tracks,
            dataset_stats: dataset_stats(references),
            warnings,
        }
    }

    /// Pretty JSON with every float rounded to 6 decimals.
    pub fn to_json(&self) -> Result<String> {
        let mut value = serde_json::to_value(self)?;
        round_floats(&mut value);
        let mut text = serde_json::to_string_pretty(&value)?;
        text.push('\n');
        Ok(text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        write(path, &self.to_json()?)
    }
}

/// Mean of each named scalar over the tracks that report it.
pub fn track_means(tracks: &[TrackReport]) -> BTreeMap<String, f64> {
    let mut sums: BTreeMap<String, (f64, usize)> = BTreeMap::new();
    for track in tracks {
        for (name, v) in track.scalars() {
            let entry = sums.entry(name).or_default();
            entry.0 += v;
            entry.1 += 1;
        }
    }
    sums.into_iter()
        .map(|(name, (sum, n))| (name, sum / n as f64))
        .collect()
}

fn round6(x: f64) -> f64 {
    (x * 1e6).round() / 1e6
}

fn round_floats(value: &mut Value) {
    match value {
        Value::Number(n) if n.is_f64() => {
            if let Some(x) = n.as_f64() {
                *value = Value::from(round6(x));
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_floats),
        Value::Object(map) => map.values_mut().for_each(round_floats),
        _ => {}
    }
}

/// Regular, non-hidden files in `dir` keyed by file stem.
pub fn files_by_stem(dir: &Path) -> Result<BTreeMap<String, PathBuf>> {
    let entries = std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut out = BTreeMap::new();
    for entry in entries {
        let entry = entry.map_err(|e| Error::io(dir, e))?;
        let path = entry.path();
        let name = entry.file_name().to_string_lossy().into_owned();
        if name.starts_with('.') || !path.is_file() {
            continue;
        }
        let stem = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or(name);
        if out.insert(stem.clone(), path).is_some() {
            return Err(Error::StemCollision {
                stem,
                dir: dir.to_owned(),
            });
        }
    }
    Ok(out)
}

/// Evaluates every reference/estimate pair whose file stems match.
///
/// Tracks run concurrently under the `parallel` feature; the report is
/// assembled in stem order so it does not depend on scheduling or
/// directory listing order. Unpaired files are reported as warnings.
pub fn evaluate_dataset(
    ref_dir: &Path,
    est_dir: &Path,
    params: &ToleranceParams,
    metric_set: MetricSet,
) -> Result<DatasetReport> {
    params.validate()?;
    let refs = files_by_stem(ref_dir)?;
    let ests = files_by_stem(est_dir)?;

    let mut warnings = Vec::new();
    let mut pairs = Vec::new();
    for (stem, ref_path) in &refs {
        match ests.get(stem) {
            Some(est_path) => pairs.push((stem.clone(), ref_path.clone(), est_path.clone())),
            None => warnings.push(format!("no estimate for reference `{stem}`; skipped")),
        }
    }
    for stem in ests.keys().filter(|s| !refs.contains_key(*s)) {
        warnings.push(format!("no reference for estimate `{stem}`; skipped"));
    }
    for w in &warnings {
        log::warn!("{w}");
    }
    if pairs.is_empty() {
        return Err(Error::NoPairsFound);
    }

    let results = par::map(&pairs, |(stem, ref_path, est_path)| {
        let reference = parse_beats_file(ref_path)?;
        let est = parse_beats_file(est_path)?;
        let report = metrics::evaluate_track(stem, &reference, &est, params, metric_set)?;
        Ok((report, reference))
    });
    let (tracks, references): (Vec<_>, Vec<_>) = results
        .into_iter()
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .unzip();
    Ok(DatasetReport::new(*params, tracks, &references, warnings))
}
