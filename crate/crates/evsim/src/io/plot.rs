//! Static SVG chart emission: line charts for load traces and a bar chart
//! for per-EV annual emissions.

use std::fs;
use std::path::Path;

use crate::error::{Result, SimError};

const WIDTH: f64 = 960.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 60.0;

struct Frame {
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
}

impl Frame {
    fn x(&self, v: f64) -> f64 {
        MARGIN + (v - self.x_min) / (self.x_max - self.x_min).max(1e-12) * (WIDTH - 2.0 * MARGIN)
    }

    fn y(&self, v: f64) -> f64 {
        HEIGHT - MARGIN
            - (v - self.y_min) / (self.y_max - self.y_min).max(1e-12) * (HEIGHT - 2.0 * MARGIN)
    }
}

fn svg_header(title: &str) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n\
         <rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n\
         <text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" \
         font-size=\"16\">{title}</text>\n",
        WIDTH / 2.0
    )
}

fn axes(frame: &Frame, x_label: &str, y_label: &str) -> String {
    let x0 = frame.x(frame.x_min);
    let x1 = frame.x(frame.x_max);
    let y0 = frame.y(frame.y_min);
    let y1 = frame.y(frame.y_max);
    format!(
        "<line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x1}\" y2=\"{y0}\" stroke=\"black\"/>\n\
         <line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x0}\" y2=\"{y1}\" stroke=\"black\"/>\n\
         <text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">{x_label}</text>\n\
         <text x=\"16\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" \
         transform=\"rotate(-90 16 {})\">{y_label}</text>\n\
         <text x=\"{x0}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"10\">{:.1}</text>\n\
         <text x=\"{x0}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"10\">{:.1}</text>\n",
        (x0 + x1) / 2.0,
        HEIGHT - 16.0,
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        y0 + 14.0,
        frame.y_min,
        y1 - 4.0,
        frame.y_max,
    )
}

fn polyline(frame: &Frame, values: &[f64], color: &str) -> String {
    let points: Vec<String> = values
        .iter()
        .enumerate()
        .map(|(i, &v)| format!("{:.2},{:.2}", frame.x(i as f64), frame.y(v)))
        .collect();
    format!(
        "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.2\" points=\"{}\"/>\n",
        points.join(" ")
    )
}

/// Line chart of one or more equally long hourly series plus a horizontal
/// capacity line.
pub fn line_chart(
    path: &Path,
    title: &str,
    x_label: &str,
    y_label: &str,
    series: &[(&str, &[f64], &str)],
    capacity: Option<f64>,
) -> Result<()> {
    let len = series.first().map(|s| s.1.len()).unwrap_or(0);
    if len == 0 {
        return Err(SimError::validation("nothing to plot"));
    }
    let y_max = series
        .iter()
        .flat_map(|s| s.1.iter().cloned())
        .chain(capacity)
        .fold(f64::MIN, f64::max)
        * 1.05;
    let frame = Frame {
        x_min: 0.0,
        x_max: (len - 1).max(1) as f64,
        y_min: 0.0,
        y_max: y_max.max(1e-9),
    };
    let mut svg = svg_header(title);
    svg.push_str(&axes(&frame, x_label, y_label));
    if let Some(cap) = capacity {
        let y = frame.y(cap);
        svg.push_str(&format!(
            "<line x1=\"{}\" y1=\"{y}\" x2=\"{}\" y2=\"{y}\" stroke=\"red\" stroke-dasharray=\"6 3\"/>\n",
            frame.x(frame.x_min),
            frame.x(frame.x_max)
        ));
    }
    for (i, (label, values, color)) in series.iter().enumerate() {
        svg.push_str(&polyline(&frame, values, color));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" fill=\"{color}\">{label}</text>\n",
            WIDTH - MARGIN - 150.0,
            36.0 + 14.0 * i as f64
        ));
    }
    svg.push_str("</svg>\n");
    fs::write(path, svg).map_err(|e| SimError::Io {
        path: path.display().to_string(),
        source: e,
    })
}

/// Bar chart of per-item values (e.g. annual kg CO2-eq per EV).
pub fn bar_chart(
    path: &Path,
    title: &str,
    x_label: &str,
    y_label: &str,
    bars: &[(String, f64)],
) -> Result<()> {
    if bars.is_empty() {
        return Err(SimError::validation("nothing to plot"));
    }
    let y_max = bars.iter().map(|b| b.1).fold(f64::MIN, f64::max) * 1.05;
    let frame = Frame {
        x_min: 0.0,
        x_max: bars.len() as f64,
        y_min: 0.0,
        y_max: y_max.max(1e-9),
    };
    let mut svg = svg_header(title);
    svg.push_str(&axes(&frame, x_label, y_label));
    let slot = (WIDTH - 2.0 * MARGIN) / bars.len() as f64;
    for (i, (_, value)) in bars.iter().enumerate() {
        let x = frame.x(i as f64) + slot * 0.1;
        let y = frame.y(*value);
        let h = frame.y(0.0) - y;
        svg.push_str(&format!(
            "<rect x=\"{x:.2}\" y=\"{y:.2}\" width=\"{:.2}\" height=\"{h:.2}\" fill=\"steelblue\"/>\n",
            slot * 0.8
        ));
    }
    svg.push_str("</svg>\n");
    fs::write(path, svg).map_err(|e| SimError::Io {
        path: path.display().to_string(),
        source: e,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn charts_emit_valid_svg() {
        let dir = tempfile::tempdir().unwrap();
        let line = dir.path().join("line.svg");
        let values: Vec<f64> = (0..24).map(|h| 100.0 + h as f64).collect();
        line_chart(
            &line,
            "day",
            "hour",
            "kW",
            &[("total", &values, "black")],
            Some(120.0),
        )
        .unwrap();
        let text = fs::read_to_string(&line).unwrap();
        assert!(text.starts_with("<svg"));
        assert!(text.contains("polyline"));

        let bar = dir.path().join("bar.svg");
        bar_chart(
            &bar,
            "per-EV",
            "EV",
            "kg",
            &[("ev0".into(), 110.0), ("ev1".into(), 120.0)],
        )
        .unwrap();
        let text = fs::read_to_string(&bar).unwrap();
        assert!(text.contains("rect"));
    }
}
