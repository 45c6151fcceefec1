//! Report artifacts: JSON summary, SVG scatter and energy plots, the
//! per-iteration trace CSV and per-class mask images.
//!
//! All outputs are byte-deterministic for fixed inputs (fixed-precision
//! float formatting in SVG, shortest round-trip formatting elsewhere).

use std::fmt::Write as _;
use std::path::Path;

use glm_core::metrics::EvalReport;
use glm_core::solver::RunTrace;
use serde::Serialize;

use crate::{CliError, Result};

/// Distinguishable fills for up to ten classes.
const PALETTE: [&str; 10] = [
    "#e41a1c", "#377eb8", "#4daf4a", "#984ea3", "#ff7f00", "#a65628", "#f781bf", "#17becf",
    "#666666", "#bcbd22",
];

/// The JSON report written by `glm run` and `glm baseline`.
#[derive(Debug, Clone, Serialize)]
pub struct ReportJson {
    pub dataset: String,
    pub method: String,
    pub params: serde_json::Value,
    pub runs: usize,
    pub mean_accuracy: f64,
    pub stddev: f64,
    pub mean_runtime_s: f64,
    pub confusion: Vec<Vec<f64>>,
}

impl ReportJson {
    pub fn new(
        dataset: String,
        method: String,
        params: serde_json::Value,
        eval: &EvalReport,
        no_timing: bool,
    ) -> Self {
        let k = eval.num_classes;
        let confusion = (0..k)
            .map(|t| eval.confusion[t * k..(t + 1) * k].to_vec())
            .collect();
        ReportJson {
            dataset,
            method,
            params,
            runs: eval.runs,
            mean_accuracy: eval.mean_accuracy,
            stddev: eval.stddev,
            mean_runtime_s: if no_timing { 0.0 } else { eval.mean_runtime_s },
            confusion,
        }
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)
            .map_err(|e| CliError::Io(format!("serialize report: {e}")))?;
        text.push('\n');
        std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
    }
}

/// Scatter plot of a 2-D projection, one circle per point colored by
/// label, with one legend entry per class.
pub fn scatter_svg(points: &[(f64, f64)], labels: &[usize], num_classes: usize) -> String {
    const W: f64 = 640.0;
    const H: f64 = 480.0;
    const MARGIN: f64 = 40.0;

    let (mut min_x, mut max_x) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut min_y, mut max_y) = (f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in points {
        min_x = min_x.min(x);
        max_x = max_x.max(x);
        min_y = min_y.min(y);
        max_y = max_y.max(y);
    }
    if points.is_empty() {
        min_x = 0.0;
        max_x = 1.0;
        min_y = 0.0;
        max_y = 1.0;
    }
    let span_x = (max_x - min_x).max(1e-12);
    let span_y = (max_y - min_y).max(1e-12);
    let sx = |x: f64| MARGIN + (x - min_x) / span_x * (W - 2.0 * MARGIN);
    let sy = |y: f64| H - MARGIN - (y - min_y) / span_y * (H - 2.0 * MARGIN);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    );
    let _ = writeln!(svg, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    for (&(x, y), &label) in points.iter().zip(labels) {
        let _ = writeln!(
            svg,
            r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{}"/>"#,
            sx(x),
            sy(y),
            PALETTE[label % PALETTE.len()]
        );
    }
    for class in 0..num_classes {
        let y = 14.0 + 16.0 * class as f64;
        let _ = writeln!(
            svg,
            r#"<rect x="{:.2}" y="{:.2}" width="10" height="10" fill="{}"/>"#,
            W - 110.0,
            y,
            PALETTE[class % PALETTE.len()]
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" font-size="12" font-family="sans-serif">class {class}</text>"#,
            W - 95.0,
            y + 9.0
        );
    }
    svg.push_str("</svg>\n");
    svg
}

/// Line chart of the energy trace: smoothing, potential, fidelity and
/// total against the iteration number.
pub fn energy_svg(trace: &RunTrace) -> String {
    const W: f64 = 640.0;
    const H: f64 = 480.0;
    const MARGIN: f64 = 50.0;
    let series: [(&str, &str); 4] = [
        ("smoothing", "#4daf4a"),
        ("potential", "#377eb8"),
        ("fidelity", "#984ea3"),
        ("total", "#e41a1c"),
    ];
    let value = |name: &str, step: &glm_core::solver::TraceStep| -> f64 {
        match name {
            "smoothing" => step.energy.smoothing,
            "potential" => step.energy.potential,
            "fidelity" => step.energy.fidelity,
            _ => step.energy.total,
        }
    };
    let n = trace.steps.len();
    let max_e = trace
        .steps
        .iter()
        .map(|s| s.energy.total)
        .fold(1e-12f64, f64::max);
    let sx = |i: usize| {
        if n <= 1 {
            W / 2.0
        } else {
            MARGIN + i as f64 / (n - 1) as f64 * (W - 2.0 * MARGIN)
        }
    };
    let sy = |e: f64| H - MARGIN - (e / max_e) * (H - 2.0 * MARGIN);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    );
    let _ = writeln!(svg, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    // axes
    let _ = writeln!(
        svg,
        r#"<line x1="{M}" y1="{Y}" x2="{X}" y2="{Y}" stroke="black"/>"#,
        M = MARGIN,
        Y = H - MARGIN,
        X = W - MARGIN
    );
    let _ = writeln!(
        svg,
        r#"<line x1="{M}" y1="{M}" x2="{M}" y2="{Y}" stroke="black"/>"#,
        M = MARGIN,
        Y = H - MARGIN
    );
    for (name, color) in series {
        let mut path = String::new();
        for (i, step) in trace.steps.iter().enumerate() {
            let _ = write!(path, "{:.2},{:.2} ", sx(i), sy(value(name, step)));
        }
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            path.trim_end()
        );
    }
    for (idx, (name, color)) in series.iter().enumerate() {
        let y = 14.0 + 16.0 * idx as f64;
        let _ = writeln!(
            svg,
            r#"<rect x="{:.2}" y="{:.2}" width="10" height="10" fill="{color}"/>"#,
            W - 130.0,
            y
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" font-size="12" font-family="sans-serif">{name}</text>"#,
            W - 115.0,
            y + 9.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" font-size="12" font-family="sans-serif">iteration</text>"#,
        W / 2.0 - 25.0,
        H - 18.0
    );
    svg.push_str("</svg>\n");
    svg
}

/// Per-iteration trace as CSV:
/// `iter,epsilon,smoothing,potential,fidelity,total,label_changes`.
pub fn trace_csv(trace: &RunTrace) -> String {
    let mut out = String::from("iter,epsilon,smoothing,potential,fidelity,total,label_changes\n");
    for (i, step) in trace.steps.iter().enumerate() {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            i + 1,
            step.epsilon,
            step.energy.smoothing,
            step.energy.potential,
            step.energy.fidelity,
            step.energy.total,
            step.label_changes
        );
    }
    out
}

/// One binary PPM mask per class: white where `labels == class`.
/// Files are named `class_<k>.ppm` under `dir`.
pub fn write_class_masks(
    labels: &[usize],
    width: usize,
    height: usize,
    num_classes: usize,
    dir: &Path,
) -> Result<Vec<std::path::PathBuf>> {
    if labels.len() != width * height {
        return Err(CliError::Config(format!(
            "{} labels for a {width}x{height} image",
            labels.len()
        )));
    }
    let mut paths = Vec::with_capacity(num_classes);
    for class in 0..num_classes {
        let mut rgb = vec![0u8; width * height * 3];
        for (i, &label) in labels.iter().enumerate() {
            if label == class {
                rgb[3 * i] = 255;
                rgb[3 * i + 1] = 255;
                rgb[3 * i + 2] = 255;
            }
        }
        let path = dir.join(format!("class_{class}.ppm"));
        crate::io::image::write_ppm(&path, width, height, &rgb)?;
        paths.push(path);
    }
    Ok(paths)
}
