//! Plot data: `(log h, log C)` points and fitted lines as CSV, and an SVG
//! rendering of the same.

use std::fmt::Write;
use std::path::{Path, PathBuf};

use crate::error::{LabError, Result};
use crate::report::{FitSummary, RunReport};
use crate::table::{write_atomic, Table};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 60.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

/// Natural-log points of every series and, where a fit exists, the fitted
/// line sampled at the same `h`.
pub fn plot_table(report: &RunReport) -> Result<Table> {
    let points: usize = report.series.iter().map(|s| s.samples.len()).sum();
    if points == 0 {
        return Err(LabError::Plot(format!("report of `{}` has no samples to plot", report.experiment)));
    }
    let mut t = Table::new(report.seed, &["series", "kind", "log_h", "log_c"]);
    for s in &report.series {
        for &(h, c) in &s.samples {
            t.push(vec![s.name.clone().into(), "point".into(), h.ln().into(), c.ln().into()]);
        }
        if let Some(fit) = fit_of(report, &s.name) {
            for &(h, _) in &s.samples {
                t.push(vec![s.name.clone().into(), "fit".into(), h.ln().into(), fit.predict(h).ln().into()]);
            }
        }
    }
    Ok(t)
}

fn fit_of<'a>(report: &'a RunReport, series: &str) -> Option<&'a FitSummary> {
    report.fits.iter().find(|f| f.series == series)
}

/// Writes `<experiment>_plot.csv` and `<experiment>_plot.svg` into `dir`.
pub fn emit_plotdata(report: &RunReport, dir: &Path) -> Result<Vec<PathBuf>> {
    let table = plot_table(report)?;
    let csv = write_atomic(&dir.join(format!("{}_plot.csv", report.experiment)), &table.to_csv())?;
    let svg = write_atomic(&dir.join(format!("{}_plot.svg", report.experiment)), render_svg(report).as_bytes())?;
    Ok(vec![csv, svg])
}

/// Log-log scatter of each series with its fitted line.
pub fn render_svg(report: &RunReport) -> String {
    let logs: Vec<(f64, f64)> = report
        .series
        .iter()
        .flat_map(|s| s.samples.iter().map(|&(h, c)| (h.log10(), c.log10())))
        .filter(|(x, y)| x.is_finite() && y.is_finite())
        .collect();
    let range = |vals: &mut dyn Iterator<Item = f64>| {
        let (lo, hi) = vals.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
        if !lo.is_finite() {
            (0.0, 1.0)
        } else if hi - lo < 1e-12 {
            (lo - 0.5, hi + 0.5)
        } else {
            let pad = 0.05 * (hi - lo);
            (lo - pad, hi + pad)
        }
    };
    let (x0, x1) = range(&mut logs.iter().map(|p| p.0));
    let (y0, y1) = range(&mut logs.iter().map(|p| p.1));
    let px = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let py = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);

    let mut out = String::new();
    let w = &mut out;
    let _ = writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(w, "<!-- experiment: {} seed: {} -->", report.experiment, report.seed);
    let _ = writeln!(w, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let (l, r, t, b) = (MARGIN, WIDTH - MARGIN, MARGIN, HEIGHT - MARGIN);
    let _ = writeln!(w, r#"<path d="M{l} {t} V{b} H{r}" fill="none" stroke="black"/>"#);
    let _ = writeln!(
        w,
        r#"<text x="{}" y="{}" text-anchor="middle" font-size="14">log10 h</text>"#,
        WIDTH / 2.0,
        HEIGHT - 15.0
    );
    let _ = writeln!(
        w,
        r#"<text x="15" y="{}" text-anchor="middle" font-size="14" transform="rotate(-90 15 {})">log10 C</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0
    );
    for (x, anchor) in [(x0, "start"), (x1, "end")] {
        let _ = writeln!(
            w,
            r#"<text x="{:.2}" y="{}" text-anchor="{anchor}" font-size="11">{x:.3}</text>"#,
            px(x),
            b + 15.0
        );
    }
    for y in [y0, y1] {
        let _ = writeln!(w, r#"<text x="{}" y="{:.2}" text-anchor="end" font-size="11">{y:.3}</text>"#, l - 5.0, py(y));
    }
    for (k, s) in report.series.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let _ = writeln!(w, r#"<g id="{}">"#, s.name);
        for &(h, c) in &s.samples {
            let (x, y) = (h.log10(), c.log10());
            if x.is_finite() && y.is_finite() {
                let _ = writeln!(w, r#"<circle cx="{:.2}" cy="{:.2}" r="4" fill="{color}"/>"#, px(x), py(y));
            }
        }
        if let Some(fit) = fit_of(report, &s.name) {
            let hs = s.samples.iter().map(|p| p.0);
            let (lo, hi) = hs.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
            let (ya, yb) = (fit.predict(lo).log10(), fit.predict(hi).log10());
            let _ = writeln!(
                w,
                r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{color}" stroke-width="1.5"/>"#,
                px(lo.log10()),
                py(ya),
                px(hi.log10()),
                py(yb)
            );
        }
        let _ = writeln!(
            w,
            r#"<text x="{}" y="{}" font-size="12" fill="{color}">{}</text>"#,
            r - 150.0,
            t + 15.0 * (k as f64 + 1.0),
            s.name
        );
        let _ = writeln!(w, "</g>");
    }
    let _ = writeln!(w, "</svg>");
    out
}
