//! Hand-written SVG figures: correlation heatmap, grouped boxplots and the
//! LDA scatter over SVM decision regions.
//!
//! Layout is fixed and every coordinate is printed with two decimals, so the
//! same input always yields the same bytes.

use std::fmt::Write as _;

use vocalfeat::ml::DecisionGrid;
use vocalfeat::stats::{BoxplotStats, CorrelationMap};

pub const VERSION_COMMENT: &str = concat!("<!-- vocalfeat ", env!("CARGO_PKG_VERSION"), " -->");

const CLASS_COLORS: [(u8, u8, u8); 6] = [
    (31, 119, 180),
    (255, 127, 14),
    (44, 160, 44),
    (214, 39, 40),
    (148, 103, 189),
    (140, 86, 75),
];

struct Svg {
    width: f64,
    height: f64,
    body: String,
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn hex((r, g, b): (u8, u8, u8)) -> String {
    format!("#{r:02x}{g:02x}{b:02x}")
}

fn mix(a: (u8, u8, u8), b: (u8, u8, u8), t: f64) -> (u8, u8, u8) {
    let f = |x: u8, y: u8| (f64::from(x) + (f64::from(y) - f64::from(x)) * t).round() as u8;
    (f(a.0, b.0), f(a.1, b.1), f(a.2, b.2))
}

fn class_color(i: usize) -> (u8, u8, u8) {
    CLASS_COLORS[i % CLASS_COLORS.len()]
}

impl Svg {
    fn new(width: f64, height: f64) -> Self {
        Self {
            width,
            height,
            body: String::new(),
        }
    }

    fn rect(&mut self, x: f64, y: f64, w: f64, h: f64, fill: &str, stroke: Option<&str>) {
        let stroke = stroke.map_or(String::new(), |s| format!(r#" stroke="{s}""#));
        let _ = writeln!(
            self.body,
            r#"<rect x="{x:.2}" y="{y:.2}" width="{w:.2}" height="{h:.2}" fill="{fill}"{stroke}/>"#
        );
    }

    fn line(&mut self, x1: f64, y1: f64, x2: f64, y2: f64, stroke: &str, width: f64) {
        let _ = writeln!(
            self.body,
            r#"<line x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}" stroke="{stroke}" stroke-width="{width:.2}"/>"#
        );
    }

    fn circle(&mut self, cx: f64, cy: f64, r: f64, fill: &str, stroke: Option<(&str, f64)>) {
        let stroke = stroke.map_or(String::new(), |(s, w)| {
            format!(r#" stroke="{s}" stroke-width="{w:.2}""#)
        });
        let _ = writeln!(
            self.body,
            r#"<circle cx="{cx:.2}" cy="{cy:.2}" r="{r:.2}" fill="{fill}"{stroke}/>"#
        );
    }

    fn text(&mut self, x: f64, y: f64, size: f64, anchor: &str, content: &str) {
        let _ = writeln!(
            self.body,
            r#"<text x="{x:.2}" y="{y:.2}" font-size="{size:.1}" text-anchor="{anchor}" font-family="sans-serif">{}</text>"#,
            esc(content)
        );
    }

    fn rotated_text(&mut self, x: f64, y: f64, size: f64, anchor: &str, content: &str) {
        let _ = writeln!(
            self.body,
            r#"<text x="{x:.2}" y="{y:.2}" font-size="{size:.1}" text-anchor="{anchor}" font-family="sans-serif" transform="rotate(-90 {x:.2} {y:.2})">{}</text>"#,
            esc(content)
        );
    }

    fn finish(self) -> String {
        format!(
            "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n{VERSION_COMMENT}\n<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w:.0}\" height=\"{h:.0}\" viewBox=\"0 0 {w:.0} {h:.0}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n{}</svg>\n",
            self.body,
            w = self.width,
            h = self.height
        )
    }
}

/// Round tick positions covering `[lo, hi]`, steps of 1, 2 or 5 × 10ⁿ.
fn ticks(lo: f64, hi: f64, target: usize) -> Vec<f64> {
    let span = hi - lo;
    if !(span > 0.0) || !span.is_finite() {
        return vec![lo];
    }
    let raw = span / target.max(1) as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|i| i as f64 * step).collect()
}

fn tick_label(v: f64) -> String {
    let s = format!("{:.4}", v);
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.into() }
}

/// Linear map from data interval to pixel interval.
#[derive(Clone, Copy)]
struct Scale {
    d0: f64,
    d1: f64,
    p0: f64,
    p1: f64,
}

impl Scale {
    fn new(d0: f64, d1: f64, p0: f64, p1: f64) -> Self {
        let (d0, d1) = if d1 > d0 { (d0, d1) } else { (d0 - 0.5, d0 + 0.5) };
        Self { d0, d1, p0, p1 }
    }

    fn at(&self, v: f64) -> f64 {
        self.p0 + (v - self.d0) / (self.d1 - self.d0) * (self.p1 - self.p0)
    }
}

fn diverging(r: f64) -> String {
    let blue = (59, 76, 192);
    let white = (247, 247, 247);
    let red = (180, 4, 38);
    let r = r.clamp(-1.0, 1.0);
    hex(if r < 0.0 { mix(white, blue, -r) } else { mix(white, red, r) })
}

/// Annotated heatmap of a correlation map.
pub fn correlation_heatmap(map: &CorrelationMap) -> String {
    let n = map.len();
    let cell = 46.0;
    let (left, top) = (110.0, 110.0);
    let mut svg = Svg::new(left + cell * n as f64 + 90.0, top + cell * n as f64 + 30.0);
    svg.text(left + cell * n as f64 / 2.0, 24.0, 15.0, "middle", "Pearson correlation");
    for (i, row) in map.matrix.iter().enumerate() {
        let y = top + cell * i as f64;
        svg.text(left - 6.0, y + cell / 2.0 + 4.0, 11.0, "end", &map.variables[i]);
        for (j, &r) in row.iter().enumerate() {
            let x = left + cell * j as f64;
            svg.rect(x, y, cell, cell, &diverging(r), Some("#ffffff"));
            let ink = if r.abs() > 0.6 { "#ffffff" } else { "#000000" };
            let _ = writeln!(
                svg.body,
                r#"<text x="{:.2}" y="{:.2}" font-size="10.0" text-anchor="middle" font-family="sans-serif" fill="{ink}">{:.2}</text>"#,
                x + cell / 2.0,
                y + cell / 2.0 + 3.5,
                r
            );
        }
    }
    for (j, name) in map.variables.iter().enumerate() {
        svg.rotated_text(left + cell * j as f64 + cell / 2.0 + 4.0, top - 6.0, 11.0, "start", name);
    }
    let bar_x = left + cell * n as f64 + 24.0;
    let steps = 40;
    let h = cell * n as f64 / steps as f64;
    for k in 0..steps {
        let r = 1.0 - 2.0 * (k as f64 + 0.5) / steps as f64;
        svg.rect(bar_x, top + h * k as f64, 16.0, h + 0.5, &diverging(r), None);
    }
    for (v, label) in [(1.0, "1"), (0.0, "0"), (-1.0, "-1")] {
        let y = top + (1.0 - v) / 2.0 * cell * n as f64;
        svg.text(bar_x + 22.0, y + 4.0, 10.0, "start", label);
    }
    svg.finish()
}

/// One boxplot panel: a box per group, whiskers at the Tukey fences,
/// outliers as open circles.
pub fn boxplot_panel(feature: &str, group_label: &str, boxes: &[BoxplotStats]) -> String {
    let (left, right, top, bottom) = (70.0, 20.0, 40.0, 50.0);
    let slot = 70.0;
    let plot_h = 260.0;
    let width = left + right + slot * boxes.len().max(1) as f64;
    let mut svg = Svg::new(width, top + plot_h + bottom);
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for b in boxes {
        for v in b.outliers.iter().chain([&b.whisker_low, &b.whisker_high]) {
            lo = lo.min(*v);
            hi = hi.max(*v);
        }
    }
    let pad = if hi > lo { 0.05 * (hi - lo) } else { 0.5 };
    let ys = Scale::new(lo - pad, hi + pad, top + plot_h, top);
    svg.text(width / 2.0, 22.0, 14.0, "middle", feature);
    svg.line(left, top, left, top + plot_h, "#000000", 1.0);
    svg.line(left, top + plot_h, width - right, top + plot_h, "#000000", 1.0);
    for t in ticks(ys.d0, ys.d1, 5) {
        let y = ys.at(t);
        svg.line(left - 4.0, y, left, y, "#000000", 1.0);
        svg.line(left, y, width - right, y, "#e0e0e0", 0.5);
        svg.text(left - 7.0, y + 4.0, 10.0, "end", &tick_label(t));
    }
    for (i, b) in boxes.iter().enumerate() {
        let cx = left + slot * (i as f64 + 0.5);
        let half = slot * 0.3;
        let color = hex(class_color(i));
        let fill = hex(mix(class_color(i), (255, 255, 255), 0.6));
        svg.line(cx, ys.at(b.whisker_low), cx, ys.at(b.q1), "#000000", 1.0);
        svg.line(cx, ys.at(b.q3), cx, ys.at(b.whisker_high), "#000000", 1.0);
        for w in [b.whisker_low, b.whisker_high] {
            svg.line(cx - half / 2.0, ys.at(w), cx + half / 2.0, ys.at(w), "#000000", 1.0);
        }
        let (y_top, y_bot) = (ys.at(b.q3), ys.at(b.q1));
        svg.rect(cx - half, y_top, 2.0 * half, (y_bot - y_top).max(0.5), &fill, Some(&color));
        svg.line(cx - half, ys.at(b.median), cx + half, ys.at(b.median), &color, 2.0);
        for &o in &b.outliers {
            svg.circle(cx, ys.at(o), 3.0, "none", Some(("#000000", 1.0)));
        }
        svg.text(cx, top + plot_h + 18.0, 11.0, "middle", &b.group);
    }
    svg.text((left + width - right) / 2.0, top + plot_h + 40.0, 12.0, "middle", group_label);
    svg.finish()
}

/// Embedded samples over the classifier's decision regions. Background cells
/// are tinted by predicted class; each sample is a dot in its true class
/// colour inside a ring in its predicted class colour.
pub fn decision_scatter(
    title: &str,
    classes: &[i64],
    grid: &DecisionGrid,
    points: &[Vec<f64>],
    truth: &[i64],
    predicted: &[i64],
) -> String {
    let (left, right, top, bottom) = (60.0, 130.0, 40.0, 50.0);
    let (plot_w, plot_h) = (420.0, if grid.ys.is_empty() { 160.0 } else { 420.0 });
    let mut svg = Svg::new(left + plot_w + right, top + plot_h + bottom);
    let class_index = |c: i64| classes.iter().position(|&k| k == c).unwrap_or(0);
    let xs = Scale::new(grid.xs[0], grid.xs[grid.xs.len() - 1], left, left + plot_w);
    let one_d = grid.ys.is_empty();
    let ys = if one_d {
        Scale::new(-1.0, 1.0, top + plot_h, top)
    } else {
        Scale::new(grid.ys[0], grid.ys[grid.ys.len() - 1], top + plot_h, top)
    };
    let half_step = |v: &[f64], i: usize| -> (f64, f64) {
        let lo = if i == 0 { v[0] } else { (v[i - 1] + v[i]) / 2.0 };
        let hi = if i + 1 == v.len() { v[i] } else { (v[i] + v[i + 1]) / 2.0 };
        (lo, hi)
    };
    let rows = if one_d { 1 } else { grid.ys.len() };
    for iy in 0..rows {
        let (y0, y1) = if one_d {
            (top + plot_h, top)
        } else {
            let (a, b) = half_step(&grid.ys, iy);
            (ys.at(a), ys.at(b))
        };
        for ix in 0..grid.xs.len() {
            let (a, b) = half_step(&grid.xs, ix);
            let (x0, x1) = (xs.at(a), xs.at(b));
            let c = class_color(class_index(grid.at(ix, iy)));
            let fill = hex(mix(c, (255, 255, 255), 0.75));
            svg.rect(x0, y1.min(y0), x1 - x0 + 0.3, (y0 - y1).abs() + 0.3, &fill, None);
        }
    }
    svg.rect(left, top, plot_w, plot_h, "none", Some("#000000"));
    for t in ticks(xs.d0, xs.d1, 6) {
        let x = xs.at(t);
        svg.line(x, top + plot_h, x, top + plot_h + 4.0, "#000000", 1.0);
        svg.text(x, top + plot_h + 16.0, 10.0, "middle", &tick_label(t));
    }
    if !one_d {
        for t in ticks(ys.d0, ys.d1, 6) {
            let y = ys.at(t);
            svg.line(left - 4.0, y, left, y, "#000000", 1.0);
            svg.text(left - 7.0, y + 4.0, 10.0, "end", &tick_label(t));
        }
        svg.rotated_text(18.0, top + plot_h / 2.0, 12.0, "middle", "LD2");
    }
    svg.text(left + plot_w / 2.0, top + plot_h + 38.0, 12.0, "middle", "LD1");
    svg.text(left + plot_w / 2.0, 22.0, 14.0, "middle", title);
    let n = points.len().max(1);
    for (i, p) in points.iter().enumerate() {
        let x = xs.at(p[0]);
        // 1-D samples are spread vertically by index so they do not overlap
        let y = if one_d {
            ys.at(-0.8 + 1.6 * (i as f64 + 0.5) / n as f64)
        } else {
            ys.at(p[1])
        };
        let ring = hex(class_color(class_index(predicted[i])));
        svg.circle(x, y, 6.5, &ring, Some(("#000000", 0.5)));
        svg.circle(x, y, 3.5, &hex(class_color(class_index(truth[i]))), Some(("#ffffff", 0.8)));
    }
    let lx = left + plot_w + 18.0;
    svg.text(lx, top + 6.0, 11.0, "start", "class");
    for (i, c) in classes.iter().enumerate() {
        let y = top + 24.0 + 20.0 * i as f64;
        svg.circle(lx + 6.0, y - 4.0, 5.0, &hex(class_color(i)), None);
        svg.text(lx + 18.0, y, 11.0, "start", &c.to_string());
    }
    let note_y = top + 34.0 + 20.0 * classes.len() as f64;
    svg.text(lx, note_y, 10.0, "start", "dot: true class");
    svg.text(lx, note_y + 14.0, 10.0, "start", "ring: predicted");
    svg.finish()
}
