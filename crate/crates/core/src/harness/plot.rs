//! Plot-data emission: long-format CSV and a deterministic SVG line chart.

use super::trace::{fmt_f64, TraceRecord};
use crate::{Error, Result};
use std::fmt::Write as _;

/// A named series extracted from one trace.
#[derive(Debug, Clone)]
pub struct Series {
    pub name: String,
    /// `(iteration, value)` points.
    pub points: Vec<(u64, f64)>,
}

/// Trace columns that can be plotted.
pub const COLUMNS: &[&str] = &[
    "loss",
    "sampled_loss",
    "step_upper",
    "step_lower_mean",
    "grad_norm",
    "evals_upper",
    "evals_lower",
];

fn column_value(rec: &TraceRecord, column: &str) -> Option<f64> {
    Some(match column {
        "loss" => rec.loss,
        "sampled_loss" => rec.sampled_loss,
        "step_upper" => rec.step_upper,
        "step_lower_mean" => rec.step_lower_mean,
        "grad_norm" => rec.grad_norm,
        "evals_upper" => rec.evals_upper as f64,
        "evals_lower" => rec.evals_lower as f64,
        _ => return None,
    })
}

/// Extract one column from each named trace.
pub fn extract_series(traces: &[(String, Vec<TraceRecord>)], column: &str) -> Result<Vec<Series>> {
    if !COLUMNS.contains(&column) {
        return Err(Error::config(format!(
            "unknown trace column '{column}' (available: {})",
            COLUMNS.join(", ")
        )));
    }
    Ok(traces
        .iter()
        .map(|(name, trace)| Series {
            name: name.clone(),
            points: trace
                .iter()
                .map(|r| (r.k, column_value(r, column).expect("column checked above")))
                .collect(),
        })
        .collect())
}

/// Long-format CSV: `series,k,value`.
pub fn series_to_csv(series: &[Series]) -> String {
    let mut out = String::from("series,k,value\n");
    for s in series {
        for &(k, v) in &s.points {
            writeln!(out, "{},{},{}", s.name, k, fmt_f64(v)).expect("writing to String");
        }
    }
    out
}

const PALETTE: &[&str] = &[
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#7f7f7f",
];

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 48.0;

/// Fixed-precision coordinate formatting keeps the SVG byte-deterministic.
fn coord(v: f64) -> String {
    format!("{v:.3}")
}

/// Render series as a minimal static SVG line chart. `log_y` plots
/// `log10(value)`, dropping non-positive points.
pub fn series_to_svg(series: &[Series], log_y: bool) -> String {
    let transform = |v: f64| if log_y { v.log10() } else { v };
    let mut xs: Vec<f64> = Vec::new();
    let mut ys: Vec<f64> = Vec::new();
    for s in series {
        for &(k, v) in &s.points {
            let y = transform(v);
            if y.is_finite() {
                xs.push(k as f64);
                ys.push(y);
            }
        }
    }
    let (x_min, x_max) = bounds(&xs);
    let (y_min, y_max) = bounds(&ys);
    let x_span = (x_max - x_min).max(1e-300);
    let y_span = (y_max - y_min).max(1e-300);
    let sx = |x: f64| MARGIN + (x - x_min) / x_span * (WIDTH - 2.0 * MARGIN);
    let sy = |y: f64| HEIGHT - MARGIN - (y - y_min) / y_span * (HEIGHT - 2.0 * MARGIN);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">"
    );
    let _ = writeln!(svg, "<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>");
    // axes
    let _ = writeln!(
        svg,
        "<line x1=\"{m}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\" stroke=\"black\"/>",
        m = coord(MARGIN),
        b = coord(HEIGHT - MARGIN),
        r = coord(WIDTH - MARGIN)
    );
    let _ = writeln!(
        svg,
        "<line x1=\"{m}\" y1=\"{t}\" x2=\"{m}\" y2=\"{b}\" stroke=\"black\"/>",
        m = coord(MARGIN),
        t = coord(MARGIN),
        b = coord(HEIGHT - MARGIN)
    );
    for (ix, s) in series.iter().enumerate() {
        let color = PALETTE[ix % PALETTE.len()];
        let mut path = String::new();
        for &(k, v) in &s.points {
            let y = transform(v);
            if !y.is_finite() {
                continue;
            }
            if path.is_empty() {
                path.push('M');
            } else {
                path.push('L');
            }
            let _ = write!(path, "{} {} ", coord(sx(k as f64)), coord(sy(y)));
        }
        if !path.is_empty() {
            let _ = writeln!(
                svg,
                "<path d=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>",
                path.trim_end()
            );
        }
        let _ = writeln!(
            svg,
            "<text x=\"{}\" y=\"{}\" font-size=\"12\" fill=\"{color}\">{}</text>",
            coord(WIDTH - MARGIN + 4.0),
            coord(MARGIN + 14.0 * ix as f64),
            escape(&s.name)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn bounds(vals: &[f64]) -> (f64, f64) {
    if vals.is_empty() {
        return (0.0, 1.0);
    }
    let min = vals.iter().cloned().fold(f64::MAX, f64::min);
    let max = vals.iter().cloned().fold(f64::MIN, f64::max);
    if min == max {
        (min - 0.5, max + 0.5)
    } else {
        (min, max)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn demo_trace(scale: f64) -> Vec<TraceRecord> {
        (0..6)
            .map(|k| TraceRecord {
                k,
                loss: scale / (k + 1) as f64,
                sampled_loss: 0.0,
                step_upper: 0.1 * scale,
                step_lower_mean: 0.0,
                grad_norm: 1.0,
                evals_upper: 1,
                evals_lower: 0,
                flags: 0,
            })
            .collect()
    }

    #[test]
    fn step_series_extracts_expected_rows() {
        let traces = vec![("spsb".to_string(), demo_trace(1.0))];
        let series = extract_series(&traces, "step_upper").unwrap();
        assert_eq!(series.len(), 1);
        assert_eq!(series[0].points.len(), 6);
        assert_eq!(series[0].points[0], (0, 0.1));
        let csv = series_to_csv(&series);
        assert!(csv.starts_with("series,k,value\nspsb,0,"));
    }

    #[test]
    fn two_traces_make_two_series() {
        let traces = vec![
            ("a".to_string(), demo_trace(1.0)),
            ("b".to_string(), demo_trace(2.0)),
        ];
        let series = extract_series(&traces, "loss").unwrap();
        let csv = series_to_csv(&series);
        assert!(csv.lines().any(|l| l.starts_with("a,")));
        assert!(csv.lines().any(|l| l.starts_with("b,")));
    }

    #[test]
    fn missing_column_is_an_error() {
        let traces = vec![("a".to_string(), demo_trace(1.0))];
        let err = extract_series(&traces, "velocity").unwrap_err();
        assert!(err.to_string().contains("velocity"));
    }

    #[test]
    fn svg_is_deterministic() {
        let traces = vec![("a".to_string(), demo_trace(1.0))];
        let series = extract_series(&traces, "loss").unwrap();
        let one = series_to_svg(&series, false);
        let two = series_to_svg(&series, false);
        assert_eq!(one, two);
        assert!(one.starts_with("<svg"));
        assert!(one.contains("</svg>"));
    }

    #[test]
    fn log_scale_drops_nonpositive_points() {
        let mut trace = demo_trace(1.0);
        trace[0].loss = 0.0;
        let series = extract_series(&[("a".to_string(), trace)], "loss").unwrap();
        let svg = series_to_svg(&series, true);
        assert!(svg.contains("<path"));
    }
}
