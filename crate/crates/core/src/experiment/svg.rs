use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

use super::csv::{format_g9, write_file};
use super::runner::{ResultRow, ResultTable};

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 460.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 60.0;
const TICKS: usize = 5;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotMetric {
    Throughput,
    Delay,
}

impl PlotMetric {
    fn value(self, row: &ResultRow) -> f64 {
        match self {
            PlotMetric::Throughput => row.metrics.avg_throughput_bpcu,
            PlotMetric::Delay => row.metrics.avg_max_delay_blocks,
        }
    }

    fn axis_label(self) -> &'static str {
        match self {
            PlotMetric::Throughput => "average throughput (bpcu)",
            PlotMetric::Delay => "average maximum delay (channel blocks)",
        }
    }
}

/// Line chart of one metric against the sweep variable, one polyline per
/// scheme.
pub fn render_svg(table: &ResultTable, metric: PlotMetric) -> Result<String> {
    let sweep = table
        .sweep
        .as_ref()
        .filter(|s| s.len() >= 2)
        .ok_or_else(|| Error::param("table", "a chart needs at least two sweep points"))?;
    let schemes = table.schemes();
    let xs: Vec<f64> = (0..sweep.len()).map(|i| sweep.value(i)).collect();
    let (x0, x1) = (xs[0], xs[xs.len() - 1]);
    let values: Vec<f64> = table.rows.iter().map(|r| metric.value(r)).collect();
    let y1 = nice_ceiling(values.iter().copied().fold(0.0, f64::max));
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let px = |x: f64| LEFT + (x - x0) / (x1 - x0) * plot_w;
    let py = |y: f64| TOP + plot_h - y / y1 * plot_h;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<rect x="{LEFT}" y="{TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
    );
    for k in 0..=TICKS {
        let f = k as f64 / TICKS as f64;
        let xv = x0 + f * (x1 - x0);
        let yv = f * y1;
        let (tx, ty) = (px(xv), py(yv));
        let _ = writeln!(
            s,
            r#"<line x1="{tx:.2}" y1="{b:.2}" x2="{tx:.2}" y2="{b2:.2}" stroke="black"/><text x="{tx:.2}" y="{l:.2}" text-anchor="middle">{v}</text>"#,
            b = TOP + plot_h,
            b2 = TOP + plot_h + 5.0,
            l = TOP + plot_h + 20.0,
            v = format_g9((xv * 1000.0).round() / 1000.0),
        );
        let _ = writeln!(
            s,
            r#"<line x1="{a:.2}" y1="{ty:.2}" x2="{LEFT}" y2="{ty:.2}" stroke="black"/><text x="{l:.2}" y="{ty:.2}" text-anchor="end" dominant-baseline="middle">{v}</text>"#,
            a = LEFT - 5.0,
            l = LEFT - 8.0,
            v = format_g9((yv * 1000.0).round() / 1000.0),
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{x:.2}" y="{y:.2}" text-anchor="middle">{label}</text>"#,
        x = LEFT + plot_w / 2.0,
        y = HEIGHT - 15.0,
        label = sweep.axis_label(),
    );
    let _ = writeln!(
        s,
        r#"<text x="20" y="{y:.2}" text-anchor="middle" transform="rotate(-90 20 {y:.2})">{label}</text>"#,
        y = TOP + plot_h / 2.0,
        label = metric.axis_label(),
    );
    for (k, name) in schemes.iter().enumerate() {
        let colour = PALETTE[k % PALETTE.len()];
        let points: Vec<String> = table
            .rows_for(name)
            .map(|r| format!("{:.2},{:.2}", px(r.sweep_value), py(metric.value(r))))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{colour}" stroke-width="2" points="{}"/>"#,
            points.join(" ")
        );
        let ly = TOP + 10.0 + 20.0 * k as f64;
        let lx = WIDTH - RIGHT + 15.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx}" y1="{ly}" x2="{x2}" y2="{ly}" stroke="{colour}" stroke-width="2"/><text x="{tx}" y="{ly}" dominant-baseline="middle">{name}</text>"#,
            x2 = lx + 25.0,
            tx = lx + 32.0,
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

/// Smallest of 1, 2, 2.5 or 5 times a power of ten that is at least `x`.
fn nice_ceiling(x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    let base = 10f64.powf(x.log10().floor());
    [1.0, 2.0, 2.5, 5.0, 10.0]
        .iter()
        .map(|m| m * base)
        .find(|&v| v >= x)
        .unwrap_or(10.0 * base)
}

pub fn emit_svg(table: &ResultTable, metric: PlotMetric, path: &Path) -> Result<()> {
    write_file(path, &render_svg(table, metric)?)
}

/// `results.svg` → `results-delay.svg`.
pub fn delay_chart_path(throughput_path: &Path) -> PathBuf {
    let stem = throughput_path.file_stem().and_then(|s| s.to_str()).unwrap_or("chart");
    let ext = throughput_path.extension().and_then(|s| s.to_str()).unwrap_or("svg");
    throughput_path.with_file_name(format!("{stem}-delay.{ext}"))
}
