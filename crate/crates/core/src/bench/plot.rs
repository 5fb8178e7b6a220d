//! SVG line charts of a bench table: one polyline per method against the
//! hit count.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::{read_csv, BenchTable, Method};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum PlotAxis {
    /// GAP percent, linear.
    Gap,
    /// TT seconds, log scale.
    Time,
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 130.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 50.0;
/// Times below this are drawn at the floor of the log axis.
const MIN_TIME: f64 = 1e-3;
const COLORS: [&str; 3] = ["#1f77b4", "#d62728", "#2ca02c"];

struct Series {
    method: Method,
    points: Vec<(f64, f64)>,
}

fn series(table: &BenchTable, axis: PlotAxis) -> Vec<Series> {
    let mut methods: Vec<Method> = table.rows.iter().map(|r| r.method).collect();
    methods.sort();
    methods.dedup();
    methods
        .into_iter()
        .filter_map(|method| {
            let mut points: Vec<(f64, f64)> = table
                .rows
                .iter()
                .filter(|r| r.method == method)
                .filter_map(|r| {
                    let y = match axis {
                        PlotAxis::Gap => r.gap?,
                        PlotAxis::Time => r.tt.max(MIN_TIME).log10(),
                    };
                    y.is_finite().then_some((r.no_hits as f64, y))
                })
                .collect();
            points.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
            (!points.is_empty()).then_some(Series { method, points })
        })
        .collect()
}

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if hi - lo < 1e-12 {
        (lo - 1.0, hi + 1.0)
    } else {
        let pad = (hi - lo) * 0.05;
        (lo - pad, hi + pad)
    }
}

pub fn plot_svg(table: &BenchTable, axis: PlotAxis) -> Result<String> {
    let series = series(table, axis);
    if series.is_empty() {
        return Err(Error::EmptyCsv);
    }
    let all = || series.iter().flat_map(|s| s.points.iter().copied());
    let (x0, x1) = range(all().map(|p| p.0));
    let (y0, y1) = match axis {
        // whole decades
        PlotAxis::Time => {
            let (lo, hi) = range(all().map(|p| p.1));
            (lo.floor(), hi.ceil())
        }
        PlotAxis::Gap => range(all().map(|p| p.1)),
    };
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| TOP + (y1 - y) / (y1 - y0) * ph;

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );

    for i in 0..=4 {
        let x = x0 + (x1 - x0) * i as f64 / 4.0;
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{:.0}</text>"#,
            sx(x),
            TOP + ph + 16.0,
            x
        );
    }
    match axis {
        PlotAxis::Time => {
            for d in (y0 as i32)..=(y1 as i32) {
                let _ = writeln!(
                    s,
                    r#"<text x="{:.2}" y="{:.2}" text-anchor="end">1e{d}</text>"#,
                    LEFT - 6.0,
                    sy(d as f64) + 4.0
                );
            }
        }
        PlotAxis::Gap => {
            for i in 0..=4 {
                let y = y0 + (y1 - y0) * i as f64 / 4.0;
                let _ = writeln!(
                    s,
                    r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{:.2}</text>"#,
                    LEFT - 6.0,
                    sy(y) + 4.0,
                    y
                );
            }
        }
    }
    let ylabel = match axis {
        PlotAxis::Gap => "GAP (%)",
        PlotAxis::Time => "TT (s, log scale)",
    };
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">number of hits</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 12.0
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">{ylabel}</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0
    );

    for (i, ser) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let pts: Vec<String> = ser.points.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
        let _ = writeln!(
            s,
            r#"<polyline class="series" data-method="{}" fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            ser.method,
            pts.join(" ")
        );
        for &(x, y) in &ser.points {
            let _ = writeln!(
                s,
                r#"<circle class="point" cx="{:.2}" cy="{:.2}" r="3" fill="{color}"/>"#,
                sx(x),
                sy(y)
            );
        }
        let ly = TOP + 10.0 + 18.0 * i as f64;
        let lx = WIDTH - RIGHT + 12.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#,
            lx + 20.0
        );
        let _ = writeln!(s, r#"<text x="{}" y="{}">{}</text>"#, lx + 26.0, ly + 4.0, ser.method);
    }
    s.push_str("</svg>\n");
    Ok(s)
}

/// Read a bench CSV and write its chart to `out`.
pub fn plot(csv: impl AsRef<Path>, axis: PlotAxis, out: impl AsRef<Path>) -> Result<()> {
    let table = read_csv(csv)?;
    fs::write(out, plot_svg(&table, axis)?)?;
    Ok(())
}
