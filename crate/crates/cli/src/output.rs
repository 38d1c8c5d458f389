use std::fmt::Write as _;

use crate::grid::GridSpec;
use crate::record::{Record, Report, CSV_HEADER};
use crate::CliError;

/// Color of `-inf` cells.
pub const NEG_INF_COLOR: &str = "#ff00ff";
/// Color of cells outside the domain or without a value.
pub const MISSING_COLOR: &str = "#d0d0d0";

const CELL: usize = 16;

pub fn csv(records: &[Record]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Io(e.to_string());
    w.write_record(CSV_HEADER).map_err(io)?;
    for r in records {
        w.write_record(r.csv_row()).map_err(io)?;
    }
    w.into_inner().map_err(|e| CliError::Io(e.to_string()))
}

pub fn json<T: serde::Serialize>(doc: &T) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(doc).expect("reports serialize");
    out.push(b'\n');
    out
}

/// Five-stop viridis ramp, `t` in `[0, 1]`.
fn ramp(t: f64) -> String {
    const STOPS: [(f64, f64, f64); 5] = [
        (68.0, 1.0, 84.0),
        (59.0, 82.0, 139.0),
        (33.0, 145.0, 140.0),
        (94.0, 201.0, 98.0),
        (253.0, 231.0, 37.0),
    ];
    let s = t.clamp(0.0, 1.0) * (STOPS.len() - 1) as f64;
    let i = (s.floor() as usize).min(STOPS.len() - 2);
    let f = s - i as f64;
    let (a, b) = (STOPS[i], STOPS[i + 1]);
    let mix = |x: f64, y: f64| (x + (y - x) * f).round() as u8;
    format!("#{:02x}{:02x}{:02x}", mix(a.0, b.0), mix(a.1, b.1), mix(a.2, b.2))
}

/// Heatmap of the upper bounds over the (at most two) varying grid axes.
pub fn svg(report: &Report, grid: &GridSpec) -> Result<Vec<u8>, CliError> {
    let varying = grid.varying();
    if varying.len() > 2 {
        return Err(CliError::Usage("an SVG heatmap needs at most two varying grid axes".into()));
    }
    let count = |k: usize| varying.get(k).map_or(1, |&i| grid.axes[i].values().len());
    let (cols, rows) = if grid.points().is_empty() { (0, 0) } else { (count(1), count(0)) };
    let finite: Vec<f64> = report.records.iter().map(|r| r.upper).filter(|v| v.is_finite()).collect();
    let lo = finite.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = finite.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = if hi > lo { hi - lo } else { 1.0 };

    let (width, height) = (cols * CELL, rows * CELL + 24);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    );
    // records come in row-major order with the last axis fastest
    for (k, r) in report.records.iter().enumerate() {
        let (row, col) = (k / cols.max(1), k % cols.max(1));
        let fill = if r.upper == f64::NEG_INFINITY {
            NEG_INF_COLOR.to_string()
        } else if r.upper.is_finite() {
            ramp((r.upper - lo) / span)
        } else {
            MISSING_COLOR.to_string()
        };
        let _ = writeln!(
            s,
            r#"<rect x="{}" y="{}" width="{CELL}" height="{CELL}" fill="{fill}"><title>{} {}</title></rect>"#,
            col * CELL,
            row * CELL,
            r.key,
            plurigreen_core::verify::ext_real::to_string(r.upper)
        );
    }
    let legend = if finite.is_empty() {
        "no finite values".to_string()
    } else {
        format!("upper in [{lo:.4}, {hi:.4}]")
    };
    let _ = writeln!(
        s,
        r#"<text x="2" y="{}" font-family="monospace" font-size="10">{legend}; -inf {NEG_INF_COLOR}; seed {}</text>"#,
        rows * CELL + 16,
        report.seed
    );
    s.push_str("</svg>\n");
    Ok(s.into_bytes())
}
