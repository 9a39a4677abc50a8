//! Minimal static SVG plots: line charts and site-time heatmaps.

use std::fmt::Write;

const WIDTH: f64 = 760.0;
const HEIGHT: f64 = 440.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 120.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 55.0;
const MAX_COLUMNS: usize = 400;

pub struct Line<'a> {
    pub label: &'a str,
    pub x: &'a [f64],
    pub y: &'a [f64],
    pub color: &'a str,
}

/// Horizontal reference line.
pub struct Level<'a> {
    pub label: &'a str,
    pub y: f64,
    pub color: &'a str,
}

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        LEFT + (x - self.x0) / (self.x1 - self.x0) * (WIDTH - LEFT - RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - BOTTOM - (y - self.y0) / (self.y1 - self.y0) * (HEIGHT - TOP - BOTTOM)
    }
}

fn header(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
        (LEFT + WIDTH - RIGHT) / 2.0,
        escape(title)
    );
}

fn axes(out: &mut String, f: &Frame, x_label: &str, y_label: &str) {
    let (l, r, t, b) = (LEFT, WIDTH - RIGHT, TOP, HEIGHT - BOTTOM);
    let _ = writeln!(
        out,
        r#"<rect x="{l:.2}" y="{t:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="black"/>"#,
        r - l,
        b - t
    );
    for k in 0..=5 {
        let x = f.x0 + (f.x1 - f.x0) * k as f64 / 5.0;
        let y = f.y0 + (f.y1 - f.y0) * k as f64 / 5.0;
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            f.px(x),
            b + 16.0,
            tick(x)
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            l - 6.0,
            f.py(y) + 4.0,
            tick(y)
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        (l + r) / 2.0,
        HEIGHT - 15.0,
        escape(x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">{}</text>"#,
        (t + b) / 2.0,
        (t + b) / 2.0,
        escape(y_label)
    );
}

fn tick(v: f64) -> String {
    let s = format!("{v:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.to_string() }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn bounds<'a>(values: impl Iterator<Item = &'a f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        (0.0, 1.0)
    } else if hi - lo < 1e-12 {
        (lo - 0.5, hi + 0.5)
    } else {
        let pad = 0.05 * (hi - lo);
        (lo - pad, hi + pad)
    }
}

pub fn line_plot(title: &str, x_label: &str, y_label: &str, lines: &[Line], levels: &[Level]) -> String {
    let (x0, x1) = {
        let (a, b) = bounds(lines.iter().flat_map(|l| l.x.iter()));
        let first = lines.iter().filter_map(|l| l.x.first()).fold(f64::INFINITY, |m, &v| m.min(v));
        let last = lines.iter().filter_map(|l| l.x.last()).fold(f64::NEG_INFINITY, |m, &v| m.max(v));
        if first.is_finite() && last > first { (first, last) } else { (a, b) }
    };
    let (y0, y1) = bounds(
        lines
            .iter()
            .flat_map(|l| l.y.iter())
            .chain(levels.iter().map(|h| &h.y)),
    );
    let f = Frame { x0, x1, y0, y1 };
    let mut out = String::new();
    header(&mut out, title);
    axes(&mut out, &f, x_label, y_label);
    for (k, line) in lines.iter().enumerate() {
        let stride = line.x.len().div_ceil(2 * MAX_COLUMNS).max(1);
        let mut points = String::new();
        for i in (0..line.x.len()).step_by(stride) {
            let _ = write!(points, "{:.2},{:.2} ", f.px(line.x[i]), f.py(line.y[i]));
        }
        let _ = writeln!(
            out,
            r#"<polyline fill="none" stroke="{}" stroke-width="1.5" points="{}"/>"#,
            line.color,
            points.trim_end()
        );
        legend(&mut out, k, line.label, line.color, false);
    }
    for (k, level) in levels.iter().enumerate() {
        let _ = writeln!(
            out,
            r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{}" stroke-dasharray="6 4"/>"#,
            LEFT,
            f.py(level.y),
            WIDTH - RIGHT,
            f.py(level.y),
            level.color
        );
        legend(&mut out, lines.len() + k, level.label, level.color, true);
    }
    out.push_str("</svg>\n");
    out
}

fn legend(out: &mut String, k: usize, label: &str, color: &str, dashed: bool) {
    let y = TOP + 12.0 + 18.0 * k as f64;
    let x = WIDTH - RIGHT + 10.0;
    let dash = if dashed { r#" stroke-dasharray="6 4""# } else { "" };
    let _ = writeln!(
        out,
        r#"<line x1="{x:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="{color}" stroke-width="2"{dash}/>"#,
        x + 22.0
    );
    let _ = writeln!(out, r#"<text x="{:.2}" y="{:.2}">{}</text>"#, x + 28.0, y + 4.0, escape(label));
}

const VIRIDIS: [(f64, f64, f64); 5] = [
    (68.0, 1.0, 84.0),
    (59.0, 82.0, 139.0),
    (33.0, 145.0, 140.0),
    (94.0, 201.0, 98.0),
    (253.0, 231.0, 37.0),
];

fn color(v: f64) -> String {
    let s = v.clamp(0.0, 1.0) * (VIRIDIS.len() - 1) as f64;
    let k = (s.floor() as usize).min(VIRIDIS.len() - 2);
    let u = s - k as f64;
    let (a, b) = (VIRIDIS[k], VIRIDIS[k + 1]);
    let mix = |p: f64, q: f64| (p + (q - p) * u).round() as u8;
    format!("#{:02x}{:02x}{:02x}", mix(a.0, b.0), mix(a.1, b.1), mix(a.2, b.2))
}

/// `values[site][time]` on a site-by-time grid; row 0 is drawn at the bottom.
pub fn heatmap(title: &str, x_label: &str, y_label: &str, x: &[f64], values: &[Vec<f64>], range: (f64, f64)) -> String {
    let rows = values.len();
    let len = x.len();
    let (x0, x1) = (x.first().copied().unwrap_or(0.0), x.last().copied().unwrap_or(1.0));
    let f = Frame {
        x0,
        x1: if x1 > x0 { x1 } else { x0 + 1.0 },
        y0: 0.5,
        y1: rows as f64 + 0.5,
    };
    let mut out = String::new();
    header(&mut out, title);
    let stride = len.div_ceil(MAX_COLUMNS).max(1);
    let cols: Vec<usize> = (0..len).step_by(stride).collect();
    let cell_h = (HEIGHT - TOP - BOTTOM) / rows.max(1) as f64;
    for (r, row) in values.iter().enumerate() {
        for (c, &i) in cols.iter().enumerate() {
            let left = f.px(x[i]);
            let right = cols.get(c + 1).map_or(WIDTH - RIGHT, |&j| f.px(x[j]));
            let v = (row[i] - range.0) / (range.1 - range.0);
            let _ = writeln!(
                out,
                r#"<rect x="{left:.2}" y="{:.2}" width="{:.2}" height="{cell_h:.2}" fill="{}"/>"#,
                f.py(r as f64 + 1.5),
                (right - left).max(0.01),
                color(v)
            );
        }
    }
    axes(&mut out, &f, x_label, y_label);
    // colour bar
    let bar_x = WIDTH - RIGHT + 20.0;
    let bar_h = HEIGHT - TOP - BOTTOM;
    for k in 0..50 {
        let v = k as f64 / 49.0;
        let _ = writeln!(
            out,
            r#"<rect x="{bar_x:.2}" y="{:.2}" width="18" height="{:.2}" fill="{}"/>"#,
            TOP + bar_h * (1.0 - (k + 1) as f64 / 50.0),
            bar_h / 50.0 + 0.5,
            color(v)
        );
    }
    for (v, y) in [(range.1, TOP + 4.0), (range.0, TOP + bar_h)] {
        let _ = writeln!(out, r#"<text x="{:.2}" y="{y:.2}">{}</text>"#, bar_x + 24.0, tick(v));
    }
    out.push_str("</svg>\n");
    out
}
