//! Coverage chart rendered as SVG.
//!
//! Layout, top to bottom: an optional panel with the activation curve and
//! beat markers, one row per condition plus the offbeat union and the
//! any-condition row, then a time axis. Each maximal run of covered beats
//! becomes one `<rect class="cov">` spanning the Voronoi cells of its beats.
//! All coordinates are printed with two decimals so output is
//! byte-identical for identical input.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::types::{ActivationFunction, BeatSequence, Condition, CoverageMatrix};

const WIDTH: f64 = 1000.0;
const MARGIN_LEFT: f64 = 160.0;
const MARGIN_RIGHT: f64 = 20.0;
const TOP: f64 = 20.0;
const PANEL_HEIGHT: f64 = 120.0;
const PANEL_GAP: f64 = 20.0;
const ROW_HEIGHT: f64 = 22.0;
const BAR_HEIGHT: f64 = 14.0;
const AXIS_HEIGHT: f64 = 40.0;

/// Rows in drawing order: `(data-row key, label, colour)`.
fn row_specs() -> Vec<(&'static str, &'static str, &'static str)> {
    vec![
        ("onbeat", "onbeat", "#2b8a3e"),
        ("offbeat", "offbeat (any)", "#e67700"),
        (Condition::OffbeatHalf.name(), "offbeat 1/2", "#f08c00"),
        (Condition::OffbeatOneThird.name(), "offbeat 1/3", "#f59f00"),
        (Condition::OffbeatTwoThird.name(), "offbeat 2/3", "#fab005"),
        (Condition::SubharmonicHalf.name(), "half tempo", "#1971c2"),
        (Condition::SubharmonicThird.name(), "third tempo", "#1c7ed6"),
        (
            Condition::SubharmonicQuarter.name(),
            "quarter tempo",
            "#339af0",
        ),
        (Condition::HarmonicDouble.name(), "double tempo", "#9c36b5"),
        (Condition::HarmonicTriple.name(), "triple tempo", "#ae3ec9"),
        (
            Condition::HarmonicQuadruple.name(),
            "quadruple tempo",
            "#be4bdb",
        ),
        ("any", "any", "#495057"),
    ]
}

fn row_values<'a>(cm: &'a CoverageMatrix, key: &str) -> &'a [bool] {
    match key {
        "any" => cm.any_row(),
        "offbeat" => cm.offbeat_row(),
        name => cm.row(name.parse().expect("row keys name conditions")),
    }
}

/// Maximal runs `(first, last)` of `true`.
pub fn covered_runs(row: &[bool]) -> Vec<(usize, usize)> {
    let mut runs = Vec::new();
    let mut start = None;
    for (k, &covered) in row.iter().enumerate() {
        match (covered, start) {
            (true, None) => start = Some(k),
            (false, Some(s)) => {
                runs.push((s, k - 1));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        runs.push((s, row.len() - 1));
    }
    runs
}

fn axis_step(span: f64) -> f64 {
    const STEPS: [f64; 12] = [
        0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0, 15.0, 30.0, 60.0, 120.0, 300.0,
    ];
    STEPS
        .into_iter()
        .find(|s| span / s <= 10.0)
        .unwrap_or(600.0)
}

struct Scale {
    end: f64,
}

impl Scale {
    fn x(&self, t: f64) -> f64 {
        MARGIN_LEFT + t.clamp(0.0, self.end) / self.end * (WIDTH - MARGIN_LEFT - MARGIN_RIGHT)
    }
}

pub fn render_coverage_svg(
    cm: &CoverageMatrix,
    reference: &BeatSequence,
    act: Option<&ActivationFunction>,
    est: Option<&BeatSequence>,
) -> Result<String> {
    if cm.n_beats() != reference.len() {
        return Err(Error::InvalidParams(format!(
            "coverage has {} beats but the reference has {}",
            cm.n_beats(),
            reference.len()
        )));
    }
    let end = [
        reference.last(),
        est.and_then(BeatSequence::last),
        act.map(ActivationFunction::duration),
    ]
    .into_iter()
    .flatten()
    .fold(0.0, f64::max);
    let scale = Scale {
        end: if end > 0.0 { end } else { 1.0 },
    };

    let has_panel = act.is_some() || est.is_some();
    let rows = row_specs();
    let rows_top = TOP
        + if has_panel {
            PANEL_HEIGHT + PANEL_GAP
        } else {
            0.0
        };
    let axis_y = rows_top + rows.len() as f64 * ROW_HEIGHT;
    let height = axis_y + AXIS_HEIGHT;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH:.0}" height="{height:.0}" viewBox="0 0 {WIDTH:.0} {height:.0}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(
        s,
        r##"<rect x="0" y="0" width="{WIDTH:.0}" height="{height:.0}" fill="#ffffff"/>"##
    );

    if has_panel {
        let _ = writeln!(s, r#"<g id="panel">"#);
        let (y0, y1) = (TOP, TOP + PANEL_HEIGHT);
        let _ = writeln!(
            s,
            r##"<rect x="{:.2}" y="{y0:.2}" width="{:.2}" height="{PANEL_HEIGHT:.2}" fill="none" stroke="#adb5bd"/>"##,
            MARGIN_LEFT,
            WIDTH - MARGIN_LEFT - MARGIN_RIGHT
        );
        for &t in reference.times() {
            let x = scale.x(t);
            let _ = writeln!(
                s,
                r##"<line class="ref" x1="{x:.2}" y1="{y0:.2}" x2="{x:.2}" y2="{y1:.2}" stroke="#212529" stroke-width="0.8"/>"##
            );
        }
        if let Some(est) = est {
            let mid = y0 + PANEL_HEIGHT * 0.5;
            for &t in est.times() {
                let x = scale.x(t);
                let _ = writeln!(
                    s,
                    r##"<line class="est" x1="{x:.2}" y1="{mid:.2}" x2="{x:.2}" y2="{y1:.2}" stroke="#e03131" stroke-width="1.2"/>"##
                );
            }
        }
        if let Some(act) = act {
            let mut points = String::new();
            for (f, &v) in act.values().iter().enumerate() {
                if f > 0 {
                    points.push(' ');
                }
                let _ = write!(
                    points,
                    "{:.2},{:.2}",
                    scale.x(act.frame_time(f)),
                    y1 - v * PANEL_HEIGHT
                );
            }
            let _ = writeln!(
                s,
                r##"<polyline class="activation" points="{points}" fill="none" stroke="#1864ab" stroke-width="1"/>"##
            );
        }
        let _ = writeln!(
            s,
            r#"<text x="8" y="{:.2}">activation / beats</text>"#,
            y0 + 14.0
        );
        let _ = writeln!(s, "</g>");
    }

    let t = reference.times();
    let cell_start = |k: usize| {
        if k == 0 {
            t.get(1).map_or(t[0], |next| t[0] - 0.5 * (next - t[0]))
        } else {
            0.5 * (t[k - 1] + t[k])
        }
    };
    let cell_end = |k: usize| {
        if k + 1 == t.len() {
            if k == 0 {
                t[0]
            } else {
                t[k] + 0.5 * (t[k] - t[k - 1])
            }
        } else {
            0.5 * (t[k] + t[k + 1])
        }
    };

    for (r, (key, label, colour)) in rows.iter().enumerate() {
        let y = rows_top + r as f64 * ROW_HEIGHT;
        let _ = writeln!(s, r#"<g class="row" data-row="{key}">"#);
        let _ = writeln!(
            s,
            r#"<text x="8" y="{:.2}">{label}</text>"#,
            y + ROW_HEIGHT * 0.5 + 4.0
        );
        let _ = writeln!(
            s,
            r##"<line x1="{MARGIN_LEFT:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#dee2e6"/>"##,
            y + ROW_HEIGHT * 0.5,
            WIDTH - MARGIN_RIGHT,
            y + ROW_HEIGHT * 0.5
        );
        for (first, last) in covered_runs(row_values(cm, key)) {
            let x0 = scale.x(cell_start(first));
            let x1 = scale.x(cell_end(last));
            let _ = writeln!(
                s,
                r#"<rect class="cov" data-row="{key}" x="{x0:.2}" y="{:.2}" width="{:.2}" height="{BAR_HEIGHT:.2}" fill="{colour}"><title>beats {}-{}</title></rect>"#,
                y + (ROW_HEIGHT - BAR_HEIGHT) * 0.5,
                (x1 - x0).max(1.0),
                first + 1,
                last + 1
            );
        }
        let _ = writeln!(s, "</g>");
    }

    let _ = writeln!(s, r#"<g id="axis">"#);
    let _ = writeln!(
        s,
        r##"<line x1="{MARGIN_LEFT:.2}" y1="{axis_y:.2}" x2="{:.2}" y2="{axis_y:.2}" stroke="#212529"/>"##,
        WIDTH - MARGIN_RIGHT
    );
    let step = axis_step(scale.end);
    let decimals = if step < 1.0 { 1 } else { 0 };
    let mut k = 0u32;
    loop {
        let tick = k as f64 * step;
        if tick > scale.end + 1e-9 {
            break;
        }
        let x = scale.x(tick);
        let _ = writeln!(
            s,
            r##"<line x1="{x:.2}" y1="{axis_y:.2}" x2="{x:.2}" y2="{:.2}" stroke="#212529"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">{tick:.decimals$}</text>"##,
            axis_y + 5.0,
            axis_y + 18.0
        );
        k += 1;
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">time (s)</text>"#,
        MARGIN_LEFT + (WIDTH - MARGIN_LEFT - MARGIN_RIGHT) * 0.5,
        axis_y + 34.0
    );
    let _ = writeln!(s, "</g>");
    s.push_str("</svg>\n");
    Ok(s)
}

pub fn write_coverage_svg(
    path: &Path,
    cm: &CoverageMatrix,
    reference: &BeatSequence,
    act: Option<&ActivationFunction>,
    est: Option<&BeatSequence>,
) -> Result<()> {
    let svg = render_coverage_svg(cm, reference, act, est)?;
    super::formats::write(path, &svg)
}
