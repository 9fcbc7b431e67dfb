//! Plain-text beat and activation files.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::types::{validate_beats, ActivationFunction, BeatSequence, ValidatedBeats};

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub(crate) fn write(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}

/// Content of a line with any `#` comment removed.
fn strip(line: &str) -> &str {
    line.split('#').next().unwrap_or("").trim()
}

/// Parses one beat time per line. Extra whitespace-separated columns,
/// blank lines and `#` comments are ignored.
pub fn parse_beats_str(text: &str, origin: &str) -> Result<ValidatedBeats> {
    let mut times = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let Some(first) = strip(raw).split_whitespace().next() else {
            continue;
        };
        let t = first.parse::<f64>().map_err(|_| Error::Parse {
            path: origin.to_owned(),
            line: idx + 1,
            message: format!("`{first}` is not a time in seconds"),
        })?;
        times.push(t);
    }
    validate_beats(&times)
}

pub fn parse_beats_file(path: &Path) -> Result<BeatSequence> {
    let origin = path.display().to_string();
    let validated = parse_beats_str(&read(path)?, &origin)?;
    if validated.duplicates > 0 {
        log::warn!(
            "{origin}: collapsed {} duplicate beat(s)",
            validated.duplicates
        );
    }
    Ok(validated.beats)
}

/// One time per line in shortest round-trip form.
pub fn format_beats(beats: &BeatSequence) -> String {
    let mut out = String::new();
    for t in beats.times() {
        let _ = writeln!(out, "{t}");
    }
    out
}

pub fn write_beats_file(path: &Path, beats: &BeatSequence) -> Result<()> {
    write(path, &format_beats(beats))
}

/// `fps=<value>` header followed by one value per line.
pub fn parse_activation_str(text: &str, origin: &str) -> Result<ActivationFunction> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, strip(l)))
        .filter(|(_, l)| !l.is_empty());
    let missing = || Error::MissingFps {
        path: origin.to_owned(),
    };
    let (header_line, header) = lines.next().ok_or_else(missing)?;
    let fps_text = header
        .strip_prefix("fps")
        .map(str::trim_start)
        .and_then(|rest| rest.strip_prefix('='))
        .ok_or_else(missing)?;
    let fps = fps_text
        .trim()
        .parse::<f64>()
        .ok()
        .filter(|f| f.is_finite() && *f > 0.0)
        .ok_or_else(|| Error::Parse {
            path: origin.to_owned(),
            line: header_line,
            message: format!("fps must be a positive number, got `{}`", fps_text.trim()),
        })?;

    let mut values = Vec::new();
    for (line, content) in lines {
        let v = content.parse::<f64>().map_err(|_| Error::Parse {
            path: origin.to_owned(),
            line,
            message: format!("`{content}` is not a number"),
        })?;
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::ValueOutOfRange {
                path: origin.to_owned(),
                line,
                value: v,
            });
        }
        values.push(v);
    }
    ActivationFunction::new(fps, values)
}

pub fn parse_activation_file(path: &Path) -> Result<ActivationFunction> {
    parse_activation_str(&read(path)?, &path.display().to_string())
}

pub fn format_activation(act: &ActivationFunction) -> String {
    let mut out = format!("fps={}\n", act.fps());
    for v in act.values() {
        let _ = writeln!(out, "{v}");
    }
    out
}

pub fn write_activation_file(path: &Path, act: &ActivationFunction) -> Result<()> {
    write(path, &format_activation(act))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn beats_one_per_line() {
        let v = parse_beats_str("0.5\n1.0\n1.5\n", "t").unwrap();
        assert_eq!(v.beats.times(), &[0.5, 1.0, 1.5]);
    }

    #[test]
    fn beats_extra_columns_and_comments() {
        let v = parse_beats_str("# header\n0.5 1\n\n1.0\t2   # downbeat\n", "t").unwrap();
        assert_eq!(v.beats.times(), &[0.5, 1.0]);
    }

    #[test]
    fn beats_parse_error_line() {
        let e = parse_beats_str("abc\n", "f.txt").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 1, .. }));
        assert!(e.to_string().starts_with("f.txt:1:"));
        assert!(matches!(
            parse_beats_str("1.0\n0.5\n", "f").unwrap_err(),
            Error::NonMonotonic { .. }
        ));
        assert!(matches!(
            parse_beats_str("", "f").unwrap_err(),
            Error::EmptySequence
        ));
    }

    #[test]
    fn beats_round_trip_exactly() {
        let b = BeatSequence::new(vec![0.1, 1.0 / 3.0, 1234.5678901234567]).unwrap();
        let back = parse_beats_str(&format_beats(&b), "t").unwrap().beats;
        assert_eq!(back, b);
    }

    #[test]
    fn activation_examples() {
        let a = parse_activation_str("fps=100\n0.0\n0.9\n", "a").unwrap();
        assert_eq!(a.fps(), 100.0);
        assert_eq!(a.values(), &[0.0, 0.9]);
        let a = parse_activation_str("# made by hand\nfps = 50\n", "a").unwrap();
        assert_eq!(a.fps(), 50.0);
        assert!(a.is_empty());

        assert!(matches!(
            parse_activation_str("0.0\n0.9\n", "a").unwrap_err(),
            Error::MissingFps { .. }
        ));
        assert!(matches!(
            parse_activation_str("", "a").unwrap_err(),
            Error::MissingFps { .. }
        ));
        assert!(matches!(
            parse_activation_str("fps=100\n0.2\n1.5\n", "a").unwrap_err(),
            Error::ValueOutOfRange { line: 3, .. }
        ));
        assert!(matches!(
            parse_activation_str("fps=-3\n", "a").unwrap_err(),
            Error::Parse { line: 1, .. }
        ));
    }

    #[test]
    fn activation_round_trip() {
        let a = ActivationFunction::new(86.1328125, vec![0.0, 0.25, 1.0 / 7.0]).unwrap();
        assert_eq!(
            parse_activation_str(&format_activation(&a), "a").unwrap(),
            a
        );
    }
}
