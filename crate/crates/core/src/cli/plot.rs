//! Minimal SVG 1.1 line plots with linear or logarithmic axes.

use std::fmt::Write;

const W: f64 = 640.0;
const H: f64 = 420.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 160.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const COLORS: [&str; 6] = ["#000000", "#1f5fbf", "#c0392b", "#2e8b57", "#8e44ad", "#d68910"];
const DASHES: [&str; 3] = ["", "6,4", "2,3"];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scale {
    Linear,
    Log,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    /// Draw markers instead of a line.
    pub markers: bool,
}

impl Series {
    pub fn line(label: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Self { label: label.into(), points, markers: false }
    }

    pub fn markers(label: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Self { label: label.into(), points, markers: true }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub x_scale: Scale,
    pub y_scale: Scale,
    pub series: Vec<Series>,
}

impl Plot {
    pub fn new(title: impl Into<String>, x_label: impl Into<String>, y_label: impl Into<String>) -> Self {
        Self {
            title: title.into(),
            x_label: x_label.into(),
            y_label: y_label.into(),
            x_scale: Scale::Linear,
            y_scale: Scale::Linear,
            series: Vec::new(),
        }
    }

    pub fn log_y(mut self) -> Self {
        self.y_scale = Scale::Log;
        self
    }

    pub fn log_x(mut self) -> Self {
        self.x_scale = Scale::Log;
        self
    }

    pub fn with(mut self, s: Series) -> Self {
        self.series.push(s);
        self
    }
}

fn usable(v: f64, s: Scale) -> bool {
    v.is_finite() && (s == Scale::Linear || v > 0.0)
}

fn tr(v: f64, s: Scale) -> f64 {
    match s {
        Scale::Linear => v,
        Scale::Log => v.log10(),
    }
}

fn range(vals: impl Iterator<Item = f64>, s: Scale) -> (f64, f64) {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for v in vals.filter(|&v| usable(v, s)) {
        let t = tr(v, s);
        lo = lo.min(t);
        hi = hi.max(t);
    }
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    match s {
        Scale::Log => (lo.floor(), if hi.ceil() > lo.floor() { hi.ceil() } else { lo.floor() + 1.0 }),
        Scale::Linear => {
            if hi - lo < 1e-300 {
                let pad = if lo == 0.0 { 1.0 } else { lo.abs() * 0.1 };
                (lo - pad, hi + pad)
            } else {
                let pad = 0.05 * (hi - lo);
                (lo - pad, hi + pad)
            }
        }
    }
}

fn nice_step(span: f64) -> f64 {
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let f = raw / mag;
    let m = if f < 1.5 {
        1.0
    } else if f < 3.5 {
        2.0
    } else if f < 7.5 {
        5.0
    } else {
        10.0
    };
    m * mag
}

/// Tick positions in transformed coordinates with their labels.
fn ticks(lo: f64, hi: f64, s: Scale) -> Vec<(f64, String)> {
    match s {
        Scale::Log => {
            let step = ((hi - lo) / 8.0).ceil().max(1.0);
            let mut out = Vec::new();
            let mut e = lo;
            while e <= hi + 1e-9 {
                out.push((e, format!("1e{}", e as i64)));
                e += step;
            }
            out
        }
        Scale::Linear => {
            let step = nice_step(hi - lo);
            let mut out = Vec::new();
            let mut k = (lo / step).ceil();
            while k * step <= hi + 1e-9 * step {
                let v = k * step;
                let v = if v.abs() < 1e-12 * step { 0.0 } else { v };
                out.push((v, trim(v)));
                k += 1.0;
            }
            out
        }
    }
}

fn trim(v: f64) -> String {
    let a = v.abs();
    if a != 0.0 && !(1e-3..1e4).contains(&a) {
        return format!("{v:.1e}");
    }
    let s = format!("{v:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.to_string()
    }
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

impl Plot {
    /// Renders a standalone SVG document.
    pub fn render(&self) -> String {
        let pts = || self.series.iter().flat_map(|s| s.points.iter());
        let (x0, x1) = range(pts().map(|p| p.0), self.x_scale);
        let (y0, y1) = range(pts().map(|p| p.1), self.y_scale);
        let pw = W - LEFT - RIGHT;
        let ph = H - TOP - BOTTOM;
        let px = |x: f64| LEFT + (tr(x, self.x_scale) - x0) / (x1 - x0) * pw;
        let py = |y: f64| TOP + ph - (tr(y, self.y_scale) - y0) / (y1 - y0) * ph;
        let mut s = String::new();
        let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(s, r#"<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>"#);
        let _ = writeln!(
            s,
            r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
            LEFT + pw / 2.0,
            esc(&self.title)
        );
        let _ = writeln!(s, r##"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="#000"/>"##);
        for (v, label) in ticks(x0, x1, self.x_scale) {
            let x = LEFT + (v - x0) / (x1 - x0) * pw;
            let _ = writeln!(
                s,
                r##"<line x1="{x:.2}" y1="{}" x2="{x:.2}" y2="{}" stroke="#000"/>"##,
                TOP + ph,
                TOP + ph + 5.0
            );
            let _ =
                writeln!(s, r#"<text x="{x:.2}" y="{}" text-anchor="middle">{}</text>"#, TOP + ph + 18.0, esc(&label));
        }
        for (v, label) in ticks(y0, y1, self.y_scale) {
            let y = TOP + ph - (v - y0) / (y1 - y0) * ph;
            let _ = writeln!(s, r##"<line x1="{}" y1="{y:.2}" x2="{LEFT}" y2="{y:.2}" stroke="#000"/>"##, LEFT - 5.0);
            let _ =
                writeln!(s, r#"<text x="{}" y="{:.2}" text-anchor="end">{}</text>"#, LEFT - 8.0, y + 4.0, esc(&label));
        }
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
            LEFT + pw / 2.0,
            H - 15.0,
            esc(&self.x_label)
        );
        let _ = writeln!(
            s,
            r#"<text x="18" y="{0}" text-anchor="middle" transform="rotate(-90 18 {0})">{1}</text>"#,
            TOP + ph / 2.0,
            esc(&self.y_label)
        );
        for (k, series) in self.series.iter().enumerate() {
            let color = COLORS[k % COLORS.len()];
            let dash = DASHES[(k / COLORS.len() + k) % DASHES.len()];
            let dash_attr = if dash.is_empty() { String::new() } else { format!(r#" stroke-dasharray="{dash}""#) };
            if series.markers {
                for &(x, y) in &series.points {
                    if usable(x, self.x_scale) && usable(y, self.y_scale) {
                        let _ = writeln!(
                            s,
                            r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="none" stroke="{color}"/>"#,
                            px(x),
                            py(y)
                        );
                    }
                }
            } else {
                // Points outside a log axis split the line.
                let mut runs: Vec<Vec<(f64, f64)>> = vec![Vec::new()];
                for &(x, y) in &series.points {
                    if usable(x, self.x_scale) && usable(y, self.y_scale) {
                        runs.last_mut().expect("non-empty").push((px(x), py(y)));
                    } else if !runs.last().expect("non-empty").is_empty() {
                        runs.push(Vec::new());
                    }
                }
                for run in runs.iter().filter(|r| !r.is_empty()) {
                    let coords: Vec<String> = run.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
                    let _ = writeln!(
                        s,
                        r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"{dash_attr}/>"#,
                        coords.join(" ")
                    );
                }
            }
            let ly = TOP + 10.0 + 18.0 * k as f64;
            let lx = W - RIGHT + 12.0;
            if series.markers {
                let _ = writeln!(s, r#"<circle cx="{}" cy="{ly}" r="3" fill="none" stroke="{color}"/>"#, lx + 12.0);
            } else {
                let _ = writeln!(
                    s,
                    r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="1.5"{dash_attr}/>"#,
                    lx + 24.0
                );
            }
            let _ = writeln!(s, r#"<text x="{}" y="{}">{}</text>"#, lx + 30.0, ly + 4.0, esc(&series.label));
        }
        s.push_str("</svg>\n");
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Plot {
        Plot::new("t <1>", "x", "y")
            .log_y()
            .with(Series::line("a", (0..50).map(|k| (k as f64, 10f64.powi(-(k % 7)))).collect()))
            .with(Series::markers("b", vec![(1.0, 0.0), (2.0, 1e-3)]))
    }

    #[test]
    fn svg_is_self_contained_and_small() {
        let svg = sample().render();
        assert!(svg.starts_with("<?xml"));
        assert!(svg.contains(r#"version="1.1""#));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert!(!svg.contains("href"));
        assert!(svg.contains("t &lt;1&gt;"));
        assert!(svg.len() < 1_000_000);
    }

    #[test]
    fn rendering_is_deterministic() {
        assert_eq!(sample().render(), sample().render());
    }

    #[test]
    fn non_positive_skipped_on_log_axis() {
        let svg = Plot::new("", "", "")
            .log_y()
            .with(Series::markers("m", vec![(0.0, 0.0), (1.0, -1.0), (2.0, 1.0)]))
            .render();
        assert_eq!(svg.matches("<circle").count(), 2);
    }

    #[test]
    fn linear_ticks_cover_range() {
        let t = ticks(-1.0, 1.0, Scale::Linear);
        assert!(t.iter().any(|(v, l)| *v == 0.0 && l == "0"));
        assert!(t.first().unwrap().0 >= -1.0 && t.last().unwrap().0 <= 1.0);
        let l = ticks(-6.0, -1.0, Scale::Log);
        assert_eq!(l.first().unwrap().1, "1e-6");
    }
}
