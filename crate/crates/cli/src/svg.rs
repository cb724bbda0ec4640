//! Minimal SVG emitters: a heatmap with iso-lines for lattice surfaces and a
//! line chart for one-parameter curves.

use std::fmt::Write as _;

const SIZE: f64 = 480.0;
const PAD: f64 = 48.0;

fn header(w: f64, h: f64, title: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="20" text-anchor="middle" font-size="14">{}</text>"#,
        w / 2.0,
        escape(title)
    );
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Blue to yellow ramp.
fn color(u: f64) -> String {
    let u = u.clamp(0.0, 1.0);
    let r = (68.0 + u * (253.0 - 68.0)) as u8;
    let g = (1.0 + u * (231.0 - 1.0)) as u8;
    let b = (84.0 + u * (37.0 - 84.0)) as u8;
    format!("#{r:02x}{g:02x}{b:02x}")
}

fn range(values: &[f64]) -> (f64, f64) {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi > lo {
        (lo, hi)
    } else {
        (lo, lo + 1.0)
    }
}

fn axes(s: &mut String, x_label: &str, y_label: &str, x_range: (f64, f64), y_range: (f64, f64)) {
    let (x0, y0, x1, y1) = (PAD, PAD + SIZE, PAD + SIZE, PAD);
    let _ = writeln!(
        s,
        r#"<path d="M{x0} {y1} L{x0} {y0} L{x1} {y0}" fill="none" stroke="black"/>"#
    );
    for k in 0..=4 {
        let u = k as f64 / 4.0;
        let x = x0 + u * SIZE;
        let y = y0 - u * SIZE;
        let xv = x_range.0 + u * (x_range.1 - x_range.0);
        let yv = y_range.0 + u * (y_range.1 - y_range.0);
        let _ = writeln!(s, r#"<text x="{x}" y="{}" text-anchor="middle">{xv:.2}</text>"#, y0 + 16.0);
        let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="end">{yv:.2}</text>"#, x0 - 4.0, y + 4.0);
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        x0 + SIZE / 2.0,
        y0 + 34.0,
        escape(x_label)
    );
    let _ = writeln!(
        s,
        r#"<text x="14" y="{}" text-anchor="middle" transform="rotate(-90 14 {})">{}</text>"#,
        y1 + SIZE / 2.0,
        y1 + SIZE / 2.0,
        escape(y_label)
    );
}

/// Heatmap of a row-major `n x n` lattice on `[0,1]^2` (first index along
/// the horizontal axis) with `levels` iso-lines by marching squares.
pub fn heatmap(title: &str, n: usize, values: &[f64], levels: usize) -> String {
    let w = SIZE + 2.0 * PAD + 60.0;
    let h = SIZE + 2.0 * PAD;
    let mut s = header(w, h, title);
    let (lo, hi) = range(values);
    let cell = SIZE / n as f64;
    let to_xy = |i: f64, j: f64| (PAD + (i + 0.5) * cell, PAD + SIZE - (j + 0.5) * cell);
    for i in 0..n {
        for j in 0..n {
            let v = values[i * n + j];
            let _ = writeln!(
                s,
                r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{}"/>"#,
                PAD + i as f64 * cell,
                PAD + SIZE - (j + 1) as f64 * cell,
                cell + 0.05,
                cell + 0.05,
                color((v - lo) / (hi - lo))
            );
        }
    }
    for k in 1..=levels {
        let level = lo + (hi - lo) * k as f64 / (levels + 1) as f64;
        let mut d = String::new();
        for i in 0..n - 1 {
            for j in 0..n - 1 {
                let corners = [
                    (i as f64, j as f64, values[i * n + j]),
                    (i as f64 + 1.0, j as f64, values[(i + 1) * n + j]),
                    (i as f64 + 1.0, j as f64 + 1.0, values[(i + 1) * n + j + 1]),
                    (i as f64, j as f64 + 1.0, values[i * n + j + 1]),
                ];
                let mut pts = Vec::with_capacity(4);
                for e in 0..4 {
                    let (xa, ya, va) = corners[e];
                    let (xb, yb, vb) = corners[(e + 1) % 4];
                    if (va < level) != (vb < level) {
                        let t = (level - va) / (vb - va);
                        pts.push((xa + t * (xb - xa), ya + t * (yb - ya)));
                    }
                }
                for seg in pts.chunks_exact(2) {
                    let (x0, y0) = to_xy(seg[0].0, seg[0].1);
                    let (x1, y1) = to_xy(seg[1].0, seg[1].1);
                    let _ = write!(d, "M{x0:.2} {y0:.2}L{x1:.2} {y1:.2}");
                }
            }
        }
        if !d.is_empty() {
            let _ = writeln!(s, r#"<path d="{d}" fill="none" stroke="white" stroke-width="0.7"/>"#);
        }
    }
    axes(&mut s, "s", "t", (0.0, 1.0), (0.0, 1.0));
    // colour bar
    let bx = PAD + SIZE + 20.0;
    for k in 0..50 {
        let u = k as f64 / 49.0;
        let _ = writeln!(
            s,
            r#"<rect x="{bx}" y="{:.2}" width="14" height="{:.2}" fill="{}"/>"#,
            PAD + SIZE - (k + 1) as f64 * SIZE / 50.0,
            SIZE / 50.0 + 0.05,
            color(u)
        );
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}">{hi:.3}</text>"#, bx + 18.0, PAD + 10.0);
    let _ = writeln!(s, r#"<text x="{}" y="{}">{lo:.3}</text>"#, bx + 18.0, PAD + SIZE);
    s.push_str("</svg>\n");
    s
}

/// A labelled polyline.
pub struct Series {
    pub label: String,
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
}

const PALETTE: [&str; 9] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22",
];

/// Line chart of several series sharing axes.
pub fn line_chart(title: &str, x_label: &str, y_label: &str, series: &[Series]) -> String {
    let w = SIZE + 2.0 * PAD + 160.0;
    let h = SIZE + 2.0 * PAD;
    let mut s = header(w, h, title);
    let all_x: Vec<f64> = series.iter().flat_map(|c| c.xs.iter().copied()).collect();
    let all_y: Vec<f64> = series.iter().flat_map(|c| c.ys.iter().copied()).collect();
    let (xa, xb) = range(&all_x);
    let (ya, yb) = range(&all_y);
    for (k, c) in series.iter().enumerate() {
        let mut d = String::new();
        for (m, (&x, &y)) in c.xs.iter().zip(&c.ys).enumerate() {
            let px = PAD + (x - xa) / (xb - xa) * SIZE;
            let py = PAD + SIZE - (y - ya) / (yb - ya) * SIZE;
            let _ = write!(d, "{}{px:.2} {py:.2}", if m == 0 { "M" } else { "L" });
        }
        let colour = PALETTE[k % PALETTE.len()];
        let _ = writeln!(s, r#"<path d="{d}" fill="none" stroke="{colour}" stroke-width="1.5"/>"#);
        let ly = PAD + 14.0 + 18.0 * k as f64;
        let lx = PAD + SIZE + 16.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{colour}" stroke-width="2"/>"#,
            lx + 20.0
        );
        let _ = writeln!(s, r#"<text x="{}" y="{}">{}</text>"#, lx + 26.0, ly + 4.0, escape(&c.label));
    }
    axes(&mut s, x_label, y_label, (xa, xb), (ya, yb));
    s.push_str("</svg>\n");
    s
}
