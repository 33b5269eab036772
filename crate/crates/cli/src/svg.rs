//! Minimal standalone SVG line plots. Output depends only on the input data,
//! with coordinates printed at fixed precision so files are byte-stable.

use std::fmt::Write as _;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN_L: f64 = 64.0;
const MARGIN_R: f64 = 120.0;
const MARGIN_T: f64 = 36.0;
const MARGIN_B: f64 = 48.0;
const TICKS: usize = 5;
const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

/// A curve; non-finite values split it into separate polylines.
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

/// Vertical dashed segment marking a discontinuity.
pub struct Marker {
    pub x: f64,
    pub y_from: f64,
    pub y_to: f64,
}

pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
    pub markers: Vec<Marker>,
}

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        MARGIN_L + (x - self.x0) / (self.x1 - self.x0) * (WIDTH - MARGIN_L - MARGIN_R)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - MARGIN_B - (y - self.y0) / (self.y1 - self.y0) * (HEIGHT - MARGIN_T - MARGIN_B)
    }
}

fn bounds<I: Iterator<Item = f64>>(values: I) -> Option<(f64, f64)> {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for v in values.filter(|v| v.is_finite()) {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if lo > hi {
        return None;
    }
    if hi - lo < 1e-12 {
        hi = lo + 1.0;
    }
    Some((lo, hi))
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

impl Plot {
    pub fn render(&self) -> Option<String> {
        let xs = self
            .series
            .iter()
            .flat_map(|s| s.points.iter().map(|p| p.0));
        let (x0, x1) = bounds(xs)?;
        let ys = self
            .series
            .iter()
            .flat_map(|s| s.points.iter().map(|p| p.1))
            .chain(self.markers.iter().flat_map(|m| [m.y_from, m.y_to]));
        let (y0, y1) = bounds(ys.chain(std::iter::once(0.0)))?;
        let pad = 0.05 * (y1 - y0);
        let f = Frame {
            x0,
            x1,
            y0: y0.min(0.0),
            y1: y1 + pad,
        };

        let mut s = String::new();
        let _ = writeln!(
            s,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"sans-serif\" font-size=\"12\">"
        );
        let _ = writeln!(s, "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>");
        let _ = writeln!(
            s,
            "<text x=\"{:.2}\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">{}</text>",
            (MARGIN_L + WIDTH - MARGIN_R) / 2.0,
            escape(&self.title)
        );
        // axes
        let (ax0, ax1) = (f.px(f.x0), f.px(f.x1));
        let (ay0, ay1) = (f.py(f.y0), f.py(f.y1));
        let _ = writeln!(
            s,
            "<path d=\"M{ax0:.2} {ay1:.2} L{ax0:.2} {ay0:.2} L{ax1:.2} {ay0:.2}\" stroke=\"black\" fill=\"none\"/>"
        );
        for i in 0..=TICKS {
            let x = f.x0 + (f.x1 - f.x0) * i as f64 / TICKS as f64;
            let y = f.y0 + (f.y1 - f.y0) * i as f64 / TICKS as f64;
            let (px, py) = (f.px(x), f.py(y));
            let _ = writeln!(
                s,
                "<line x1=\"{px:.2}\" y1=\"{ay0:.2}\" x2=\"{px:.2}\" y2=\"{:.2}\" stroke=\"black\"/><text x=\"{px:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{x:.3}</text>",
                ay0 + 4.0,
                ay0 + 18.0
            );
            let _ = writeln!(
                s,
                "<line x1=\"{:.2}\" y1=\"{py:.2}\" x2=\"{ax0:.2}\" y2=\"{py:.2}\" stroke=\"black\"/><text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\">{y:.3}</text>",
                ax0 - 4.0,
                ax0 - 6.0,
                py + 4.0
            );
        }
        let _ = writeln!(
            s,
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{}</text>",
            (ax0 + ax1) / 2.0,
            HEIGHT - 10.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            s,
            "<text x=\"16\" y=\"{:.2}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {:.2})\">{}</text>",
            (ay0 + ay1) / 2.0,
            (ay0 + ay1) / 2.0,
            escape(&self.y_label)
        );

        for (i, series) in self.series.iter().enumerate() {
            let color = COLORS[i % COLORS.len()];
            for run in series
                .points
                .split(|p| !(p.0.is_finite() && p.1.is_finite()))
                .filter(|r| !r.is_empty())
            {
                let pts: Vec<String> = run
                    .iter()
                    .map(|&(x, y)| format!("{:.2},{:.2}", f.px(x), f.py(y)))
                    .collect();
                let _ = writeln!(
                    s,
                    "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>",
                    pts.join(" ")
                );
            }
            let ly = MARGIN_T + 16.0 * i as f64 + 8.0;
            let lx = WIDTH - MARGIN_R + 10.0;
            let _ = writeln!(
                s,
                "<line x1=\"{lx:.2}\" y1=\"{ly:.2}\" x2=\"{:.2}\" y2=\"{ly:.2}\" stroke=\"{color}\" stroke-width=\"2\"/><text x=\"{:.2}\" y=\"{:.2}\">{}</text>",
                lx + 20.0,
                lx + 26.0,
                ly + 4.0,
                escape(&series.label)
            );
        }
        for m in &self.markers {
            let (px, a, b) = (f.px(m.x), f.py(m.y_from), f.py(m.y_to));
            let _ = writeln!(
                s,
                "<line x1=\"{px:.2}\" y1=\"{a:.2}\" x2=\"{px:.2}\" y2=\"{b:.2}\" stroke=\"black\" stroke-dasharray=\"4 3\"/><circle cx=\"{px:.2}\" cy=\"{a:.2}\" r=\"3\" fill=\"white\" stroke=\"black\"/><circle cx=\"{px:.2}\" cy=\"{b:.2}\" r=\"3\" fill=\"black\"/>"
            );
        }
        s.push_str("</svg>\n");
        Some(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Plot {
        Plot {
            title: "t".into(),
            x_label: "x".into(),
            y_label: "y".into(),
            series: vec![Series {
                label: "a<b".into(),
                points: vec![(0.0, 0.0), (0.5, 1.0), (0.7, f64::INFINITY), (1.0, 2.0)],
            }],
            markers: vec![Marker {
                x: 1.0,
                y_from: 0.0,
                y_to: 2.0,
            }],
        }
    }

    #[test]
    fn rendering_is_stable_and_splits_at_infinities() {
        let a = sample().render().unwrap();
        assert_eq!(a, sample().render().unwrap());
        assert_eq!(a.matches("<polyline").count(), 2);
        assert!(a.contains("a&lt;b"));
        assert!(a.contains("stroke-dasharray"));
    }

    #[test]
    fn empty_plot_is_none() {
        let p = Plot {
            title: String::new(),
            x_label: String::new(),
            y_label: String::new(),
            series: vec![],
            markers: vec![],
        };
        assert!(p.render().is_none());
    }
}
