//! Scenario text format.
//!
//! One `key = value` per line, `#` starts a comment:
//!
//! ```text
//! duration = 60            # seconds, required
//! tempo = 120              # constant BPM, or knots `time:bpm, time:bpm, ...`
//! segment = 0 harmonic_double          # start beat, condition [, jitter std]
//! segment = 60 harmonic_quadruple 0.005
//! fps = 100                # activation frame rate (optional)
//! peak_width = 0.02        # activation bump std, seconds (optional)
//! noise = 0.0              # activation noise std (optional)
//! ```

use std::path::Path;

use super::{ActivationSettings, Scenario, Segment, TempoCurve};
use crate::error::{Error, Result};

pub fn load_scenario(path: &Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_scenario(&text, &path.display().to_string())
}

/// Parses scenario text; `origin` names the source in error messages.
pub fn parse_scenario(text: &str, origin: &str) -> Result<Scenario> {
    let err = |line: usize, message: String| Error::Parse {
        path: origin.to_owned(),
        line,
        message,
    };
    let number = |line: usize, s: &str| -> Result<f64> {
        s.trim()
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| err(line, format!("`{}` is not a number", s.trim())))
    };

    let mut duration = None;
    let mut tempo = None;
    let mut segments = Vec::new();
    let mut activation = ActivationSettings::default();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| err(line, "expected `key = value`".into()))?;
        let value = value.trim();
        match key.trim() {
            "duration" => duration = Some(number(line, value)?),
            "tempo" => {
                let knots = if value.contains(':') {
                    value
                        .split(',')
                        .map(|knot| {
                            let (t, bpm) = knot
                                .split_once(':')
                                .ok_or_else(|| err(line, format!("bad tempo knot `{knot}`")))?;
                            Ok((number(line, t)?, number(line, bpm)?))
                        })
                        .collect::<Result<Vec<_>>>()?
                } else {
                    vec![(0.0, number(line, value)?)]
                };
                tempo = Some(TempoCurve::new(knots).map_err(|e| err(line, e.to_string()))?);
            }
            "segment" => {
                let fields: Vec<&str> = value.split_whitespace().collect();
                if !(2..=3).contains(&fields.len()) {
                    return Err(err(line, "segment needs `start condition [jitter]`".into()));
                }
                let start = fields[0]
                    .parse::<usize>()
                    .map_err(|_| err(line, format!("bad start beat `{}`", fields[0])))?;
                let condition = fields[1]
                    .parse()
                    .map_err(|e: Error| err(line, e.to_string()))?;
                let jitter_std = match fields.get(2) {
                    Some(j) => number(line, j)?,
                    None => 0.0,
                };
                segments.push(Segment {
                    start,
                    condition,
                    jitter_std,
                });
            }
            "fps" => activation.fps = number(line, value)?,
            "peak_width" => activation.peak_width = number(line, value)?,
            "noise" => activation.noise_std = number(line, value)?,
            other => return Err(err(line, format!("unknown key `{other}`"))),
        }
    }

    let missing = |what: &str| Error::Scenario(format!("{origin}: missing `{what}`"));
    Ok(Scenario {
        tempo: tempo.ok_or_else(|| missing("tempo"))?,
        duration: duration.ok_or_else(|| missing("duration"))?,
        segments,
        activation,
    })
}
