use std::fmt::Write;

use crate::error::Error;

use super::config::ExperimentError;
use super::runner::ResultRow;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 440.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Line plot with one curve per policy and a band `mean ± (p95 - mean)`.
/// Output depends only on `rows`.
pub fn emit_plot(rows: &[ResultRow]) -> Result<String, ExperimentError> {
    let first = rows.first().ok_or(Error::EmptyInput("no rows to plot"))?;
    if rows.iter().any(|r| r.experiment != first.experiment) {
        return Err(Error::InvalidParameter("rows from several experiments".into()).into());
    }
    let mut policies: Vec<&str> = Vec::new();
    for r in rows {
        if !policies.contains(&r.policy.as_str()) {
            policies.push(&r.policy);
        }
    }

    let band = |r: &ResultRow| (r.p95 - r.mean).abs();
    let (mut x_lo, mut x_hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut y_lo, mut y_hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for r in rows {
        x_lo = x_lo.min(r.sweep);
        x_hi = x_hi.max(r.sweep);
        y_lo = y_lo.min(r.mean - band(r));
        y_hi = y_hi.max(r.mean + band(r));
    }
    if x_hi - x_lo <= 0.0 {
        x_lo -= 0.5;
        x_hi += 0.5;
    }
    if !(y_hi - y_lo > 0.0) {
        y_lo -= 0.5;
        y_hi += 0.5;
    }
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x_lo) / (x_hi - x_lo) * plot_w;
    let sy = |y: f64| TOP + (y_hi - y) / (y_hi - y_lo) * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
        LEFT + plot_w / 2.0,
        escape(&first.experiment)
    );
    let _ = writeln!(
        svg,
        r##"<rect x="{LEFT}" y="{TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="#333"/>"##
    );
    for k in 0..=4 {
        let fx = k as f64 / 4.0;
        let (xv, yv) = (x_lo + fx * (x_hi - x_lo), y_lo + fx * (y_hi - y_lo));
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            sx(xv),
            HEIGHT - BOTTOM + 18.0,
            tick(xv)
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            LEFT - 6.0,
            sy(yv) + 4.0,
            tick(yv)
        );
    }

    for (k, policy) in policies.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let mut pts: Vec<&ResultRow> = rows.iter().filter(|r| r.policy == *policy).collect();
        pts.sort_by(|a, b| a.sweep.total_cmp(&b.sweep));

        let upper = pts.iter().map(|r| format!("{:.2},{:.2}", sx(r.sweep), sy(r.mean + band(r))));
        let lower = pts.iter().rev().map(|r| format!("{:.2},{:.2}", sx(r.sweep), sy(r.mean - band(r))));
        let outline: Vec<String> = upper.chain(lower).collect();
        let _ = writeln!(
            svg,
            r#"<polygon points="{}" fill="{color}" fill-opacity="0.18" stroke="none"/>"#,
            outline.join(" ")
        );
        let line: Vec<String> = pts
            .iter()
            .map(|r| format!("{:.2},{:.2}", sx(r.sweep), sy(r.mean)))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
            line.join(" ")
        );
        for r in &pts {
            let _ = writeln!(
                svg,
                r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{color}"/>"#,
                sx(r.sweep),
                sy(r.mean)
            );
        }
        let ly = TOP + 10.0 + 20.0 * k as f64;
        let lx = WIDTH - RIGHT + 15.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/>"#,
            lx + 20.0
        );
        let _ = writeln!(
            svg,
            r#"<text class="legend" x="{:.2}" y="{:.2}">{}</text>"#,
            lx + 26.0,
            ly + 4.0,
            escape(policy)
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn tick(v: f64) -> String {
    if v.abs() >= 1e4 || (v != 0.0 && v.abs() < 1e-2) {
        format!("{v:.2e}")
    } else {
        format!("{v:.3}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(policy: &str, sweep: f64, mean: f64) -> ResultRow {
        ResultRow {
            experiment: "demo".into(),
            sweep,
            policy: policy.into(),
            mean,
            stderr: 0.0,
            p95: mean * 1.1,
            n: 1,
            seed: 0,
        }
    }

    #[test]
    fn single_row_plot() {
        let svg = emit_plot(&[row("lai", 1.0, 1.0)]).unwrap();
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<polyline").count(), 1);
    }

    #[test]
    fn two_policies_two_curves_with_legend() {
        let mut rows = Vec::new();
        for t in 1..=100 {
            rows.push(row("robd", t as f64, 0.1 * t as f64));
            rows.push(row("lai-gamma:1", t as f64, 0.01));
        }
        let svg = emit_plot(&rows).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 2);
        let legends: Vec<&str> = svg
            .lines()
            .filter(|l| l.contains("class=\"legend\""))
            .map(|l| l.rsplit_once('>').unwrap().0.rsplit_once("\">").unwrap().1.trim_end_matches("</text"))
            .collect();
        assert_eq!(legends, vec!["robd", "lai-gamma:1"]);
        assert_eq!(svg, emit_plot(&rows).unwrap());
    }

    #[test]
    fn empty_input_rejected() {
        assert!(matches!(
            emit_plot(&[]),
            Err(ExperimentError::Runtime(Error::EmptyInput(_)))
        ));
    }
}
