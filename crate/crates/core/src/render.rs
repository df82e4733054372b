//! Dependency-free SVG 1.1 figures: lag heatmaps plus bar, box, line and
//! scatter charts. Output is a deterministic function of the input.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::influence::{offset_label, LagHeatmap};
use crate::stats::DistributionStats;
use crate::time;

pub const UNDEFINED_FILL: &str = "#bdbdbd";
pub const HEATMAP_X_LABEL: &str = "News leading \u{2190} offset \u{2192} Twitter leading";

const PALETTE: &[&str] = &[
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
];

/// Blue (-1) to white (0) to red (+1), linear in sRGB. Inputs are clamped.
pub fn diverging_color(h: f64) -> (u8, u8, u8) {
    let t = h.clamp(-1.0, 1.0);
    let c = |v: f64| v.round() as u8;
    if t >= 0.0 {
        (255, c(255.0 * (1.0 - t)), c(255.0 * (1.0 - t)))
    } else {
        (c(255.0 * (1.0 + t)), c(255.0 * (1.0 + t)), 255)
    }
}

pub fn hex((r, g, b): (u8, u8, u8)) -> String {
    format!("#{r:02x}{g:02x}{b:02x}")
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            _ => out.push(c),
        }
    }
    out
}

/// Trims trailing zeros so coordinates stay short and stable.
fn num(v: f64) -> String {
    let s = format!("{v:.2}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".to_string() } else { s.to_string() }
}

struct Svg {
    body: String,
    width: f64,
    height: f64,
}

impl Svg {
    fn new(width: f64, height: f64) -> Self {
        Self {
            body: String::new(),
            width,
            height,
        }
    }

    fn rect(&mut self, x: f64, y: f64, w: f64, h: f64, fill: &str, extra: &str) {
        let _ = writeln!(
            self.body,
            r#"<rect x="{}" y="{}" width="{}" height="{}" fill="{fill}"{extra}/>"#,
            num(x),
            num(y),
            num(w),
            num(h)
        );
    }

    fn line(&mut self, x1: f64, y1: f64, x2: f64, y2: f64, stroke: &str) {
        let _ = writeln!(
            self.body,
            r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{stroke}" stroke-width="1"/>"#,
            num(x1),
            num(y1),
            num(x2),
            num(y2)
        );
    }

    fn text(&mut self, x: f64, y: f64, s: &str, anchor: &str, size: u32) {
        let _ = writeln!(
            self.body,
            r#"<text x="{}" y="{}" font-size="{size}" text-anchor="{anchor}">{}</text>"#,
            num(x),
            num(y),
            escape(s)
        );
    }

    fn vtext(&mut self, x: f64, y: f64, s: &str, size: u32) {
        let _ = writeln!(
            self.body,
            r#"<text x="{0}" y="{1}" font-size="{size}" text-anchor="middle" transform="rotate(-90 {0} {1})">{2}</text>"#,
            num(x),
            num(y),
            escape(s)
        );
    }

    fn finish(self) -> String {
        format!(
            "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n\
             <svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{w}\" height=\"{h}\" \
             viewBox=\"0 0 {w} {h}\" font-family=\"sans-serif\">\n\
             <rect x=\"0\" y=\"0\" width=\"{w}\" height=\"{h}\" fill=\"#ffffff\"/>\n{}</svg>\n",
            self.body,
            w = num(self.width),
            h = num(self.height)
        )
    }
}

/// Roughly `target` evenly spaced round tick values covering `[lo, hi]`.
fn ticks(lo: f64, hi: f64, target: usize) -> Vec<f64> {
    let span = (hi - lo).max(1e-12);
    let raw = span / target.max(1) as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|k| k as f64 * step).collect()
}

fn tick_label(v: f64) -> String {
    if v.abs() >= 1e5 || (v != 0.0 && v.abs() < 1e-3) {
        format!("{v:.1e}")
    } else {
        num((v * 1e4).round() / 1e4)
    }
}

/// Plot frame with a linear y-axis.
struct Frame {
    left: f64,
    top: f64,
    width: f64,
    height: f64,
    y_min: f64,
    y_max: f64,
}

impl Frame {
    fn new(y_min: f64, y_max: f64, width: f64, height: f64) -> Self {
        let (y_min, y_max) = if y_max > y_min {
            let pad = (y_max - y_min) * 0.05;
            (y_min - pad, y_max + pad)
        } else {
            (y_min - 1.0, y_max + 1.0)
        };
        Self {
            left: 70.0,
            top: 40.0,
            width,
            height,
            y_min,
            y_max,
        }
    }

    fn y(&self, v: f64) -> f64 {
        self.top + self.height * (1.0 - (v - self.y_min) / (self.y_max - self.y_min))
    }

    fn bottom(&self) -> f64 {
        self.top + self.height
    }

    fn draw_axes(&self, svg: &mut Svg, title: &str, y_label: &str) {
        svg.text(self.left + self.width / 2.0, 22.0, title, "middle", 14);
        for t in ticks(self.y_min, self.y_max, 6) {
            let y = self.y(t);
            svg.line(self.left - 4.0, y, self.left + self.width, y, "#e0e0e0");
            svg.text(self.left - 6.0, y + 4.0, &tick_label(t), "end", 10);
        }
        svg.line(self.left, self.top, self.left, self.bottom(), "#000000");
        svg.line(self.left, self.bottom(), self.left + self.width, self.bottom(), "#000000");
        svg.vtext(16.0, self.top + self.height / 2.0, y_label, 12);
    }
}

fn legend(svg: &mut Svg, x: f64, y: f64, names: &[&str]) {
    for (i, name) in names.iter().enumerate() {
        let yy = y + i as f64 * 16.0;
        svg.rect(x, yy, 10.0, 10.0, PALETTE[i % PALETTE.len()], "");
        svg.text(x + 14.0, yy + 9.0, name, "start", 11);
    }
}

fn finite_range(values: impl Iterator<Item = f64>) -> Option<(f64, f64)> {
    values
        .filter(|v| v.is_finite())
        .fold(None, |acc, v| match acc {
            None => Some((v, v)),
            Some((lo, hi)) => Some((lo.min(v), hi.max(v))),
        })
}

/// Renders a lag heatmap: rows are window starts, columns offsets.
pub fn heatmap_svg(hm: &LagHeatmap, title: &str) -> Result<String> {
    if hm.defined_cells() == 0 {
        return Err(Error::Output("heatmap has no defined cells to render".to_string()));
    }
    let (rows, cols) = (hm.rows(), hm.cols());
    let cell_w = (600.0 / cols as f64).clamp(4.0, 40.0);
    let cell_h = (480.0 / rows as f64).clamp(2.0, 40.0);
    let (left, top) = (90.0, 40.0);
    let grid_w = cell_w * cols as f64;
    let grid_h = cell_h * rows as f64;
    let mut svg = Svg::new(left + grid_w + 110.0, top + grid_h + 60.0);
    svg.text(left + grid_w / 2.0, 22.0, title, "middle", 14);

    for r in 0..rows {
        for c in 0..cols {
            let fill = match hm.get(r, c) {
                Some(h) => hex(diverging_color(h)),
                None => UNDEFINED_FILL.to_string(),
            };
            svg.rect(left + c as f64 * cell_w, top + r as f64 * cell_h, cell_w, cell_h, &fill, "");
        }
    }

    let row_every = rows.div_ceil(20).max(1);
    for r in (0..rows).step_by(row_every) {
        let label = time::date_of(hm.row_starts[r]).to_string();
        svg.text(left - 4.0, top + (r as f64 + 0.5) * cell_h + 3.0, &label, "end", 9);
    }
    let col_every = cols.div_ceil(9).max(1);
    let centre = cols / 2;
    for c in (0..cols).filter(|c| c.abs_diff(centre) % col_every == 0) {
        let x = left + (c as f64 + 0.5) * cell_w;
        svg.line(x, top + grid_h, x, top + grid_h + 4.0, "#000000");
        svg.text(x, top + grid_h + 15.0, &offset_label(hm.offsets[c]), "middle", 9);
    }
    svg.text(left + grid_w / 2.0, top + grid_h + 34.0, HEATMAP_X_LABEL, "middle", 12);
    svg.vtext(14.0, top + grid_h / 2.0, "window start", 12);

    let (bar_x, bar_h) = (left + grid_w + 20.0, grid_h.min(240.0));
    let steps = 40;
    for i in 0..steps {
        let v = 1.0 - 2.0 * i as f64 / (steps - 1) as f64;
        svg.rect(bar_x, top + bar_h * i as f64 / steps as f64, 14.0, bar_h / steps as f64 + 0.5, &hex(diverging_color(v)), "");
    }
    for (v, label) in [(1.0, "+1"), (0.0, "0"), (-1.0, "-1")] {
        svg.text(bar_x + 18.0, top + bar_h * (1.0 - v) / 2.0 + 4.0, label, "start", 10);
    }
    svg.rect(bar_x, top + bar_h + 10.0, 14.0, 10.0, UNDEFINED_FILL, "");
    svg.text(bar_x + 18.0, top + bar_h + 19.0, "undefined", "start", 10);
    Ok(svg.finish())
}

/// Grouped bars; `None` values leave a gap.
pub fn bar_chart(title: &str, categories: &[String], series: &[(&str, Vec<Option<f64>>)], y_label: &str) -> Result<String> {
    if categories.is_empty() || series.is_empty() {
        return Err(Error::Output(format!("bar chart {title:?} has no data")));
    }
    if series.iter().any(|(_, v)| v.len() != categories.len()) {
        return Err(Error::Output(format!("bar chart {title:?} has ragged series")));
    }
    let (lo, hi) = finite_range(series.iter().flat_map(|(_, v)| v.iter().flatten().copied()))
        .ok_or_else(|| Error::Output(format!("bar chart {title:?} has no finite values")))?;
    let frame = Frame::new(lo.min(0.0), hi.max(0.0), (categories.len() * series.len()) as f64 * 18.0 + categories.len() as f64 * 24.0, 300.0);
    let mut svg = Svg::new(frame.left + frame.width + 160.0, frame.bottom() + 90.0);
    frame.draw_axes(&mut svg, title, y_label);

    let group_w = frame.width / categories.len() as f64;
    let bar_w = (group_w - 24.0) / series.len() as f64;
    let zero = frame.y(0.0);
    for (ci, cat) in categories.iter().enumerate() {
        let gx = frame.left + ci as f64 * group_w + 12.0;
        for (si, (_, values)) in series.iter().enumerate() {
            if let Some(v) = values[ci].filter(|v| v.is_finite()) {
                let y = frame.y(v);
                svg.rect(gx + si as f64 * bar_w, y.min(zero), bar_w, (y - zero).abs(), PALETTE[si % PALETTE.len()], "");
            }
        }
        let cx = gx + (group_w - 24.0) / 2.0;
        let cy = frame.bottom() + 12.0;
        let _ = writeln!(
            svg.body,
            r#"<text x="{0}" y="{1}" font-size="10" text-anchor="end" transform="rotate(-35 {0} {1})">{2}</text>"#,
            num(cx),
            num(cy),
            escape(cat)
        );
    }
    svg.line(frame.left, zero, frame.left + frame.width, zero, "#000000");
    if series.len() > 1 {
        let names: Vec<&str> = series.iter().map(|(n, _)| *n).collect();
        legend(&mut svg, frame.left + frame.width + 16.0, frame.top, &names);
    }
    Ok(svg.finish())
}

/// Box-and-whisker plot: box p25..p75 with median, whiskers p5..p95, min and max dots.
pub fn box_plot(title: &str, groups: &[(String, DistributionStats)], y_label: &str) -> Result<String> {
    if groups.is_empty() {
        return Err(Error::Output(format!("box plot {title:?} has no groups")));
    }
    let (lo, hi) = finite_range(groups.iter().flat_map(|(_, s)| [s.min, s.max]))
        .ok_or_else(|| Error::Output(format!("box plot {title:?} has no finite values")))?;
    let frame = Frame::new(lo, hi, groups.len() as f64 * 60.0, 300.0);
    let mut svg = Svg::new(frame.left + frame.width + 30.0, frame.bottom() + 90.0);
    frame.draw_axes(&mut svg, title, y_label);
    for (i, (label, s)) in groups.iter().enumerate() {
        let cx = frame.left + (i as f64 + 0.5) * 60.0;
        let color = PALETTE[i % PALETTE.len()];
        svg.line(cx, frame.y(s.p5), cx, frame.y(s.p95), "#000000");
        svg.rect(cx - 16.0, frame.y(s.p75), 32.0, (frame.y(s.p25) - frame.y(s.p75)).max(0.5), color, r#" fill-opacity="0.6" stroke="black""#);
        svg.line(cx - 16.0, frame.y(s.median), cx + 16.0, frame.y(s.median), "#000000");
        for v in [s.min, s.max] {
            let _ = writeln!(svg.body, r#"<circle cx="{}" cy="{}" r="2" fill="black"/>"#, num(cx), num(frame.y(v)));
        }
        let cy = frame.bottom() + 12.0;
        let _ = writeln!(
            svg.body,
            r#"<text x="{0}" y="{1}" font-size="10" text-anchor="end" transform="rotate(-35 {0} {1})">{2}</text>"#,
            num(cx),
            num(cy),
            escape(label)
        );
    }
    Ok(svg.finish())
}

/// Polyline per series over a shared numeric x-axis.
pub fn line_chart(title: &str, x_label: &str, y_label: &str, series: &[(&str, Vec<(f64, f64)>)]) -> Result<String> {
    let pts = || series.iter().flat_map(|(_, p)| p.iter().copied()).filter(|(x, y)| x.is_finite() && y.is_finite());
    let (x_lo, x_hi) = finite_range(pts().map(|p| p.0))
        .ok_or_else(|| Error::Output(format!("line chart {title:?} has no finite points")))?;
    let (y_lo, y_hi) = finite_range(pts().map(|p| p.1)).unwrap_or((0.0, 1.0));
    let frame = Frame::new(y_lo.min(0.0), y_hi, 520.0, 300.0);
    let x_span = if x_hi > x_lo { x_hi - x_lo } else { 1.0 };
    let px = |x: f64| frame.left + frame.width * (x - x_lo) / x_span;
    let mut svg = Svg::new(frame.left + frame.width + 200.0, frame.bottom() + 60.0);
    frame.draw_axes(&mut svg, title, y_label);
    for t in ticks(x_lo, x_hi, 8) {
        svg.line(px(t), frame.bottom(), px(t), frame.bottom() + 4.0, "#000000");
        svg.text(px(t), frame.bottom() + 16.0, &tick_label(t), "middle", 10);
    }
    svg.text(frame.left + frame.width / 2.0, frame.bottom() + 36.0, x_label, "middle", 12);
    for (i, (_, points)) in series.iter().enumerate() {
        let coords: Vec<String> = points
            .iter()
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .map(|&(x, y)| format!("{},{}", num(px(x)), num(frame.y(y))))
            .collect();
        let _ = writeln!(
            svg.body,
            r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="1.5"/>"#,
            coords.join(" "),
            PALETTE[i % PALETTE.len()]
        );
    }
    let names: Vec<&str> = series.iter().map(|(n, _)| *n).collect();
    legend(&mut svg, frame.left + frame.width + 16.0, frame.top, &names);
    Ok(svg.finish())
}

/// Scatter of `(x, y)` points.
pub fn scatter_plot(title: &str, x_label: &str, y_label: &str, points: &[(f64, f64)]) -> Result<String> {
    let finite: Vec<(f64, f64)> = points.iter().copied().filter(|(x, y)| x.is_finite() && y.is_finite()).collect();
    let (x_lo, x_hi) = finite_range(finite.iter().map(|p| p.0))
        .ok_or_else(|| Error::Output(format!("scatter plot {title:?} has no finite points")))?;
    let (y_lo, y_hi) = finite_range(finite.iter().map(|p| p.1)).unwrap_or((0.0, 1.0));
    let frame = Frame::new(y_lo, y_hi, 400.0, 300.0);
    let pad = if x_hi > x_lo { (x_hi - x_lo) * 0.05 } else { 1.0 };
    let (x_lo, x_hi) = (x_lo - pad, x_hi + pad);
    let px = |x: f64| frame.left + frame.width * (x - x_lo) / (x_hi - x_lo);
    let mut svg = Svg::new(frame.left + frame.width + 30.0, frame.bottom() + 60.0);
    frame.draw_axes(&mut svg, title, y_label);
    for t in ticks(x_lo, x_hi, 6) {
        svg.line(px(t), frame.bottom(), px(t), frame.bottom() + 4.0, "#000000");
        svg.text(px(t), frame.bottom() + 16.0, &tick_label(t), "middle", 10);
    }
    svg.text(frame.left + frame.width / 2.0, frame.bottom() + 36.0, x_label, "middle", 12);
    for (x, y) in finite {
        let _ = writeln!(
            svg.body,
            r#"<circle cx="{}" cy="{}" r="2.5" fill="{}" fill-opacity="0.7"/>"#,
            num(px(x)),
            num(frame.y(y)),
            PALETTE[0]
        );
    }
    Ok(svg.finish())
}
