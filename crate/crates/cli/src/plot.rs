use std::fmt::Write as _;
use std::path::Path;

use anyhow::{bail, Context};
use toda_core::laxflow::ResidualReport;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 440.0;
const MARGIN: f64 = 60.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

/// Least-squares slope of `log y` against `log x`; `None` with fewer than two distinct abscissae.
pub fn loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    let logs: Vec<(f64, f64)> = points.iter().filter(|(x, y)| *x > 0.0 && *y > 0.0).map(|(x, y)| (x.ln(), y.ln())).collect();
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if logs.len() < 2 || sxx <= 0.0 {
        return None;
    }
    Some(logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / sxx)
}

/// Writes a log-log plot of `sup_residual` against `h`, one series per row name.
pub fn emit_plot(report: &ResidualReport, path: &Path) -> anyhow::Result<()> {
    if report.is_empty() {
        bail!("cannot plot an empty report");
    }
    let series: Vec<(String, Vec<(f64, f64)>)> = report
        .names()
        .into_iter()
        .map(|name| {
            let pts = report.series(&name).iter().map(|r| (r.h, r.sup_residual)).filter(|(h, s)| *h > 0.0 && *s > 0.0 && s.is_finite()).collect();
            (name, pts)
        })
        .collect();
    let all: Vec<(f64, f64)> = series.iter().flat_map(|(_, p)| p.iter().map(|(x, y)| (x.log10(), y.log10()))).collect();
    let range = |f: fn(&(f64, f64)) -> f64| {
        let lo = all.iter().map(f).fold(f64::INFINITY, f64::min);
        let hi = all.iter().map(f).fold(f64::NEG_INFINITY, f64::max);
        if all.is_empty() {
            (-1.0, 0.0)
        } else if hi - lo < 1e-9 {
            (lo - 0.5, hi + 0.5)
        } else {
            (lo, hi)
        }
    };
    let (x0, x1) = range(|p| p.0);
    let (y0, y1) = range(|p| p.1);
    let px = |x: f64| MARGIN + (x.log10() - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let py = |y: f64| HEIGHT - MARGIN - (y.log10() - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);

    let mut svg = String::new();
    writeln!(svg, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="12">"#)?;
    writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#)?;
    writeln!(
        svg,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        WIDTH - 2.0 * MARGIN,
        HEIGHT - 2.0 * MARGIN
    )?;
    writeln!(svg, r#"<text x="{}" y="{}" text-anchor="middle">log10 h</text>"#, WIDTH / 2.0, HEIGHT - 15.0)?;
    writeln!(svg, r#"<text x="15" y="{}" transform="rotate(-90 15 {})" text-anchor="middle">log10 sup residual</text>"#, HEIGHT / 2.0, HEIGHT / 2.0)?;
    for (v, anchor, x, y) in [(x0, "start", MARGIN, HEIGHT - MARGIN + 16.0), (x1, "end", WIDTH - MARGIN, HEIGHT - MARGIN + 16.0)] {
        writeln!(svg, r#"<text x="{x}" y="{y}" text-anchor="{anchor}">{v:.2}</text>"#)?;
    }
    for (v, y) in [(y0, HEIGHT - MARGIN), (y1, MARGIN + 10.0)] {
        writeln!(svg, r#"<text x="{}" y="{y}" text-anchor="end">{v:.2}</text>"#, MARGIN - 4.0)?;
    }
    for (i, (name, pts)) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        if pts.len() > 1 {
            let path: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y))).collect();
            writeln!(svg, r#"<polyline points="{}" fill="none" stroke="{color}"/>"#, path.join(" "))?;
        }
        for &(x, y) in pts {
            writeln!(svg, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}"/>"#, px(x), py(y))?;
        }
        let label = match loglog_slope(pts) {
            Some(s) => format!("{name} (slope {s:.2})"),
            None => name.clone(),
        };
        writeln!(svg, r#"<text x="{}" y="{}" fill="{color}">{label}</text>"#, MARGIN + 8.0, MARGIN + 16.0 * (i as f64 + 1.0))?;
    }
    svg.push_str("</svg>\n");
    std::fs::write(path, svg).with_context(|| format!("writing plot {}", path.display()))
}
