//! Self-contained SVG rendering of success-probability curves and of the
//! correctable region boundary. Output bytes depend only on the input data.

use std::fmt::Write as _;

use super::threshold::{estimate_all, ThresholdOptions};
use super::{rays, CurvePoint, McError};

const PANEL_W: f64 = 480.0;
const PANEL_H: f64 = 320.0;
const MARGIN: f64 = 56.0;
const PALETTE: [&str; 8] = ["#1b6ca8", "#d1495b", "#2e933c", "#8e44ad", "#e07a1f", "#00798c", "#6c757d", "#b5838d"];

struct Frame {
    x0: f64,
    y0: f64,
    xmin: f64,
    xmax: f64,
    ymin: f64,
    ymax: f64,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        let span = (self.xmax - self.xmin).max(1e-12);
        self.x0 + MARGIN + (x - self.xmin) / span * (PANEL_W - 1.5 * MARGIN)
    }

    fn py(&self, y: f64) -> f64 {
        let span = (self.ymax - self.ymin).max(1e-12);
        self.y0 + PANEL_H - MARGIN - (y - self.ymin) / span * (PANEL_H - 1.5 * MARGIN)
    }

    fn axes(&self, svg: &mut String, title: &str, xlabel: &str, ylabel: &str) {
        let (l, r) = (self.px(self.xmin), self.px(self.xmax));
        let (b, t) = (self.py(self.ymin), self.py(self.ymax));
        writeln!(svg, r##"<rect x="{l:.2}" y="{t:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="#333"/>"##, r - l, b - t).unwrap();
        for k in 0..=4 {
            let fx = self.xmin + (self.xmax - self.xmin) * k as f64 / 4.0;
            let fy = self.ymin + (self.ymax - self.ymin) * k as f64 / 4.0;
            writeln!(svg, r#"<text x="{:.2}" y="{:.2}" font-size="10" text-anchor="middle">{}</text>"#, self.px(fx), b + 14.0, tick(fx)).unwrap();
            writeln!(svg, r#"<text x="{:.2}" y="{:.2}" font-size="10" text-anchor="end">{}</text>"#, l - 4.0, self.py(fy) + 3.0, tick(fy)).unwrap();
        }
        writeln!(svg, r#"<text x="{:.2}" y="{:.2}" font-size="12" text-anchor="middle">{}</text>"#, (l + r) / 2.0, t - 8.0, escape(title)).unwrap();
        writeln!(svg, r#"<text x="{:.2}" y="{:.2}" font-size="11" text-anchor="middle">{}</text>"#, (l + r) / 2.0, b + 30.0, escape(xlabel)).unwrap();
        writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" font-size="11" text-anchor="middle" transform="rotate(-90 {:.2} {:.2})">{}</text>"#,
            l - 40.0,
            (t + b) / 2.0,
            l - 40.0,
            (t + b) / 2.0,
            escape(ylabel)
        )
        .unwrap();
    }
}

fn tick(v: f64) -> String {
    if v == 0.0 || (v.abs() >= 0.01 && v.abs() < 1000.0) {
        format!("{v:.3}")
    } else {
        format!("{v:.2e}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn polyline(svg: &mut String, pts: &[(f64, f64)], color: &str) {
    let coords: Vec<String> = pts.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
    writeln!(svg, r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#, coords.join(" ")).unwrap();
}

/// One panel per ray with `Π` against `x` for each lattice size, followed by a
/// boundary panel in the `(p_error, p_erasure)` plane when the data hold more
/// than one ray.
pub fn render_svg(points: &[CurvePoint]) -> Result<String, McError> {
    if points.is_empty() {
        return Err(McError::Data("nothing to plot".into()));
    }
    let ray_list = rays(points);
    let boundary = ray_list.len() > 1;
    let panels = ray_list.len() + usize::from(boundary);
    let mut svg = String::new();
    writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{:.0}" height="{:.0}" font-family="sans-serif">"#,
        PANEL_W,
        PANEL_H * panels as f64
    )
    .unwrap();
    writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();

    for (row, (model, ce, cz)) in ray_list.iter().enumerate() {
        let subset: Vec<&CurvePoint> =
            points.iter().filter(|p| &p.model == model && p.c_error == *ce && p.c_erasure == *cz).collect();
        let xmin = subset.iter().map(|p| p.x).fold(f64::INFINITY, f64::min);
        let xmax = subset.iter().map(|p| p.x).fold(f64::NEG_INFINITY, f64::max);
        let frame = Frame { x0: 0.0, y0: row as f64 * PANEL_H, xmin, xmax, ymin: 0.0, ymax: 1.0 };
        frame.axes(&mut svg, &format!("{model}  c_error={ce}  c_erasure={cz}"), "x", "success probability");
        let mut sizes: Vec<usize> = subset.iter().map(|p| p.l).collect();
        sizes.sort_unstable();
        sizes.dedup();
        for (k, &l) in sizes.iter().enumerate() {
            let color = PALETTE[k % PALETTE.len()];
            let mut series: Vec<&&CurvePoint> = subset.iter().filter(|p| p.l == l).collect();
            series.sort_by(|a, b| a.x.total_cmp(&b.x));
            let pts: Vec<(f64, f64)> = series.iter().map(|p| (frame.px(p.x), frame.py(p.pi_hat))).collect();
            polyline(&mut svg, &pts, color);
            for (p, &(x, y)) in series.iter().zip(&pts) {
                let err = 2.0 * p.stderr * (frame.py(0.0) - frame.py(1.0));
                writeln!(svg, r#"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="{color}"/>"#, y - err / 2.0, y + err / 2.0).unwrap();
                writeln!(svg, r#"<circle cx="{x:.2}" cy="{y:.2}" r="2.5" fill="{color}"/>"#).unwrap();
            }
            let lx = frame.px(frame.xmax) - 60.0;
            let ly = frame.py(1.0) + 14.0 + 13.0 * k as f64;
            writeln!(svg, r#"<text x="{lx:.2}" y="{ly:.2}" font-size="10" fill="{color}">L = {l}</text>"#).unwrap();
        }
    }

    if boundary {
        let estimates = estimate_all(points, ThresholdOptions { bootstrap: 0, ..Default::default() });
        let mut models: Vec<&String> = Vec::new();
        for e in &estimates {
            if !models.contains(&&e.0) {
                models.push(&e.0);
            }
        }
        let mut series: Vec<(String, Vec<(f64, f64)>)> = Vec::new();
        for model in models {
            let mut pts: Vec<(f64, f64)> = estimates
                .iter()
                .filter(|e| &e.0 == model)
                .filter_map(|e| e.3.as_ref().ok().map(|t| (t.p_error_th, t.p_erasure_th)))
                .collect();
            // Order along the boundary by ray angle, from the erasure axis down.
            pts.sort_by(|a, b| a.0.atan2(a.1).total_cmp(&b.0.atan2(b.1)));
            series.push((model.clone(), pts));
        }
        let xmax = series.iter().flat_map(|s| s.1.iter().map(|p| p.0)).fold(0.0, f64::max) * 1.1;
        let ymax = series.iter().flat_map(|s| s.1.iter().map(|p| p.1)).fold(0.0, f64::max) * 1.1;
        let frame = Frame {
            x0: 0.0,
            y0: ray_list.len() as f64 * PANEL_H,
            xmin: 0.0,
            xmax: if xmax > 0.0 { xmax } else { 1.0 },
            ymin: 0.0,
            ymax: if ymax > 0.0 { ymax } else { 1.0 },
        };
        frame.axes(&mut svg, "correctable region boundary", "p_error", "p_erasure");
        for (k, (model, pts)) in series.iter().enumerate() {
            let color = PALETTE[k % PALETTE.len()];
            let px: Vec<(f64, f64)> = pts.iter().map(|&(x, y)| (frame.px(x), frame.py(y))).collect();
            polyline(&mut svg, &px, color);
            for &(x, y) in &px {
                writeln!(svg, r#"<circle cx="{x:.2}" cy="{y:.2}" r="2.5" fill="{color}"/>"#).unwrap();
            }
            let lx = frame.px(frame.xmax) - 110.0;
            let ly = frame.py(frame.ymax) + 14.0 + 13.0 * k as f64;
            writeln!(svg, r#"<text x="{lx:.2}" y="{ly:.2}" font-size="10" fill="{color}">{}</text>"#, escape(model)).unwrap();
        }
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}
