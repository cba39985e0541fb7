//! Standalone SVG line charts with fixed number formatting, so the bytes only
//! depend on the data.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{CliError, Result};
use crate::output::write_text;

pub const FRONTIER_SVG: &str = "frontier_curve.svg";
pub const SWEEP_SVG: &str = "sweep_curve.svg";
pub const DECOMPOSITION_SVG: &str = "decomposition_curve.svg";

/// Color of the dashed marker at the accuracy-optimal classifier.
pub const ACCURACY_OPTIMUM_COLOR: &str = "#2ca02c";
/// Color of the dashed marker at the fairness-optimal classifier.
pub const FAIRNESS_OPTIMUM_COLOR: &str = "#000000";

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 72.0;
const RIGHT: f64 = 180.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 56.0;
const TICKS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Style {
    Line,
    Points,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub color: &'static str,
    pub style: Style,
    pub points: Vec<(f64, f64)>,
}

/// A dashed vertical marker.
#[derive(Debug, Clone, PartialEq)]
pub struct Vertical {
    pub x: f64,
    pub color: &'static str,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Figure {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
    pub verticals: Vec<Vertical>,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(v), hi.max(v))
        });
    let span = hi - lo;
    let pad = if span > 0.0 {
        0.03 * span
    } else {
        0.5 * lo.abs().max(1.0)
    };
    (lo - pad, hi + pad)
}

/// Renders `fig`; every series must be nonempty.
pub fn render(fig: &Figure) -> Result<String> {
    if fig.series.is_empty() {
        return Err(CliError::Core(fairfrontier_core::Error::Input(format!(
            "figure `{}` has no series",
            fig.title
        ))));
    }
    if let Some(s) = fig.series.iter().find(|s| {
        s.points
            .iter()
            .all(|p| !(p.0.is_finite() && p.1.is_finite()))
    }) {
        return Err(CliError::Core(fairfrontier_core::Error::Input(format!(
            "series `{}` of figure `{}` is empty",
            s.name, fig.title
        ))));
    }
    let all = || fig.series.iter().flat_map(|s| s.points.iter().copied());
    let (x0, x1) = bounds(all().map(|p| p.0).chain(fig.verticals.iter().map(|v| v.x)));
    let (y0, y1) = bounds(all().map(|p| p.1));
    let (pw, ph) = (WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM);
    let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| TOP + (1.0 - (y - y0) / (y1 - y0)) * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        s,
        r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="24" text-anchor="middle" font-size="14">{}</text>"#,
        LEFT + pw / 2.0,
        escape(&fig.title)
    );
    let _ = writeln!(
        s,
        r##"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="#444"/>"##
    );
    for i in 0..=TICKS {
        let f = i as f64 / TICKS as f64;
        let (xv, yv) = (x0 + f * (x1 - x0), y0 + f * (y1 - y0));
        let (px, py) = (sx(xv), sy(yv));
        let _ = writeln!(
            s,
            r##"<line x1="{px:.2}" y1="{:.2}" x2="{px:.2}" y2="{:.2}" stroke="#444"/><text x="{px:.2}" y="{:.2}" text-anchor="middle">{xv:.3}</text>"##,
            TOP + ph,
            TOP + ph + 5.0,
            TOP + ph + 18.0
        );
        let _ = writeln!(
            s,
            r##"<line x1="{:.2}" y1="{py:.2}" x2="{LEFT}" y2="{py:.2}" stroke="#444"/><text x="{:.2}" y="{:.2}" text-anchor="end">{yv:.3}</text>"##,
            LEFT - 5.0,
            LEFT - 8.0,
            py + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 14.0,
        escape(&fig.x_label)
    );
    let _ = writeln!(
        s,
        r#"<text x="18" y="{:.1}" text-anchor="middle" transform="rotate(-90 18 {:.1})">{}</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0,
        escape(&fig.y_label)
    );

    for v in &fig.verticals {
        if !v.x.is_finite() {
            continue;
        }
        let px = sx(v.x);
        let _ = writeln!(
            s,
            r#"<line x1="{px:.2}" y1="{TOP}" x2="{px:.2}" y2="{:.2}" stroke="{}" stroke-width="1.5" stroke-dasharray="6 4"/>"#,
            TOP + ph,
            v.color
        );
    }
    for series in &fig.series {
        let pts: Vec<(f64, f64)> = series
            .points
            .iter()
            .filter(|p| p.0.is_finite() && p.1.is_finite())
            .map(|&(x, y)| (sx(x), sy(y)))
            .collect();
        match series.style {
            Style::Line => {
                let path: Vec<String> = pts.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
                let _ = writeln!(
                    s,
                    r#"<polyline fill="none" stroke="{}" stroke-width="1.5" points="{}"/>"#,
                    series.color,
                    path.join(" ")
                );
            }
            Style::Points => {
                let _ = writeln!(s, r#"<g fill="{}">"#, series.color);
                for (x, y) in &pts {
                    let _ = writeln!(s, r#"<circle cx="{x:.2}" cy="{y:.2}" r="1.5"/>"#);
                }
                let _ = writeln!(s, "</g>");
            }
        }
    }

    let lx = WIDTH - RIGHT + 12.0;
    let mut ly = TOP + 10.0;
    for series in &fig.series {
        let _ = writeln!(
            s,
            r#"<line x1="{lx}" y1="{ly}" x2="{:.1}" y2="{ly}" stroke="{}" stroke-width="3"/><text x="{:.1}" y="{:.1}">{}</text>"#,
            lx + 20.0,
            series.color,
            lx + 26.0,
            ly + 4.0,
            escape(&series.name)
        );
        ly += 18.0;
    }
    for v in fig.verticals.iter().filter(|v| v.x.is_finite()) {
        let _ = writeln!(
            s,
            r#"<line x1="{lx}" y1="{ly}" x2="{:.1}" y2="{ly}" stroke="{}" stroke-width="1.5" stroke-dasharray="6 4"/><text x="{:.1}" y="{:.1}">{}</text>"#,
            lx + 20.0,
            v.color,
            lx + 26.0,
            ly + 4.0,
            escape(&v.label)
        );
        ly += 18.0;
    }
    s.push_str("</svg>\n");
    Ok(s)
}

/// Renders and writes `fig`; nothing is written when rendering fails.
pub fn emit_plot(fig: &Figure, path: &Path) -> Result<()> {
    let svg = render(fig)?;
    write_text(path, &svg)
}

/// Keeps at most `max` points, evenly strided, always including the last.
pub fn thin(points: Vec<(f64, f64)>, max: usize) -> Vec<(f64, f64)> {
    if points.len() <= max || max < 2 {
        return points;
    }
    let n = points.len();
    (0..max).map(|i| points[i * (n - 1) / (max - 1)]).collect()
}
