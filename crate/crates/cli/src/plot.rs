//! Minimal self-contained SVG line charts of an energy trace.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use freemin_core::EnergyTrace;

use crate::error::CliError;

/// Errors at or below zero are drawn at this value on the log axis.
pub const ERROR_FLOOR: f64 = 1e-16;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    Energy,
    Error,
}

impl FromStr for PlotKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "energy" => Ok(Self::Energy),
            "error" => Ok(Self::Error),
            _ => Err(format!("expected energy or error, got {s:?}")),
        }
    }
}

struct Axis {
    lo: f64,
    hi: f64,
    ticks: Vec<(f64, String)>,
}

fn linear_axis(values: &[f64]) -> Axis {
    let mut lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if hi - lo <= 1e-12 * lo.abs().max(hi.abs()).max(1e-300) {
        let pad = 0.5 * lo.abs().max(1.0);
        lo -= pad;
        hi += pad;
    }
    let ticks = (0..=4)
        .map(|k| {
            let v = lo + (hi - lo) * k as f64 / 4.0;
            (v, format!("{v:.6}"))
        })
        .collect();
    Axis { lo, hi, ticks }
}

/// Axis in log10 units, snapped outward to whole decades.
fn log_axis(values: &[f64]) -> Axis {
    let lo = values.iter().cloned().fold(f64::INFINITY, f64::min).floor();
    let mut hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max).ceil();
    if hi <= lo {
        hi = lo + 1.0;
    }
    let stride = ((hi - lo) / 8.0).ceil().max(1.0);
    let mut ticks = Vec::new();
    let mut d = lo;
    while d <= hi {
        ticks.push((d, format!("1e{}", d as i64)));
        d += stride;
    }
    Axis { lo, hi, ticks }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// The chart as an SVG document. Iterations run along the horizontal axis.
pub fn render_svg(trace: &EnergyTrace, kind: PlotKind, title: &str) -> String {
    let (values, axis, label): (Vec<f64>, Axis, &str) = match kind {
        PlotKind::Energy => (trace.energies.clone(), linear_axis(&trace.energies), "free energy"),
        PlotKind::Error => {
            let v: Vec<f64> = trace.errors.iter().map(|e| e.max(ERROR_FLOOR).log10()).collect();
            let axis = log_axis(&v);
            (v, axis, "free energy error")
        }
    };
    let last = values.len().saturating_sub(1).max(1) as f64;
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let sx = |k: f64| LEFT + plot_w * k / last;
    let sy = |v: f64| TOP + plot_h * (1.0 - (v - axis.lo) / (axis.hi - axis.lo));

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="18" font-family="sans-serif" font-size="14" text-anchor="middle">{}</text>"#,
        LEFT + plot_w / 2.0,
        escape(title)
    );
    let _ =
        writeln!(svg, r#"<rect x="{LEFT}" y="{TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#);
    for (v, text) in &axis.ticks {
        let y = sy(*v);
        let _ = writeln!(
            svg,
            r##"<line x1="{LEFT}" y1="{y:.2}" x2="{}" y2="{y:.2}" stroke="#ddd"/><text x="{}" y="{:.2}" font-family="sans-serif" font-size="11" text-anchor="end">{text}</text>"##,
            LEFT + plot_w,
            LEFT - 6.0,
            y + 4.0
        );
    }
    for k in 0..=4 {
        let it = (last * k as f64 / 4.0).round();
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{}" font-family="sans-serif" font-size="11" text-anchor="middle">{}</text>"#,
            sx(it),
            TOP + plot_h + 16.0,
            it as i64
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12" text-anchor="middle">iteration</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 10.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="16" y="{}" font-family="sans-serif" font-size="12" text-anchor="middle" transform="rotate(-90 16 {})">{label}</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0
    );
    let points: Vec<String> =
        values.iter().enumerate().map(|(k, v)| format!("{:.2},{:.2}", sx(k as f64), sy(*v))).collect();
    let _ =
        writeln!(svg, r#"<polyline fill="none" stroke="steelblue" stroke-width="1.5" points="{}"/>"#, points.join(" "));
    svg.push_str("</svg>\n");
    svg
}

pub fn emit_svg_plot(trace: &EnergyTrace, kind: PlotKind, path: &Path) -> Result<(), CliError> {
    if trace.is_empty() {
        return Err(CliError::BadTrace { path: path.to_path_buf(), message: "empty trace".into() });
    }
    let title = path.file_stem().and_then(|s| s.to_str()).unwrap_or("trace");
    fs::write(path, render_svg(trace, kind, title)).map_err(|e| CliError::io(path, e))
}
