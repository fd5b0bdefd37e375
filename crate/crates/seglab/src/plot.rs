//! Static SVG scatter plots with a least-squares trend line per series.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::analysis::{measure, AnalysisInput};
use crate::error::{write_file, Result};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 60.0;
const COLOURS: [&str; 6] = [
    "#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02",
];

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScatterPlot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
    /// Draw y = x across the shared range.
    pub diagonal: bool,
}

/// `(slope, intercept)`, or `None` with fewer than two distinct x.
pub fn least_squares(points: &[(f64, f64)]) -> Option<(f64, f64)> {
    let n = points.len() as f64;
    if points.len() < 2 {
        return None;
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn new(plot: &ScatterPlot) -> Self {
        let pts = || plot.series.iter().flat_map(|s| s.points.iter());
        let (mut x0, mut x1, mut y0, mut y1) = (
            f64::INFINITY,
            f64::NEG_INFINITY,
            f64::INFINITY,
            f64::NEG_INFINITY,
        );
        for &(x, y) in pts() {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
        if !x0.is_finite() {
            (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
        }
        if plot.diagonal {
            let (lo, hi) = (x0.min(y0), x1.max(y1));
            (x0, x1, y0, y1) = (lo, hi, lo, hi);
        }
        // Pad so single points and flat series sit inside the frame.
        let pad = |lo: f64, hi: f64| {
            let p = if hi > lo {
                0.05 * (hi - lo)
            } else {
                0.5f64.max(lo.abs() * 0.05)
            };
            (lo - p, hi + p)
        };
        let (x0, x1) = pad(x0, x1);
        let (y0, y1) = pad(y0, y1);
        Frame { x0, x1, y0, y1 }
    }

    fn sx(&self, x: f64) -> f64 {
        MARGIN + (x - self.x0) / (self.x1 - self.x0) * (WIDTH - 2.0 * MARGIN)
    }

    fn sy(&self, y: f64) -> f64 {
        HEIGHT - MARGIN - (y - self.y0) / (self.y1 - self.y0) * (HEIGHT - 2.0 * MARGIN)
    }

    fn line(&self, out: &mut String, (xa, ya): (f64, f64), (xb, yb): (f64, f64), style: &str) {
        let _ = writeln!(
            out,
            r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" {style}/>"#,
            self.sx(xa),
            self.sy(ya),
            self.sx(xb),
            self.sy(yb)
        );
    }
}

pub fn render_svg(plot: &ScatterPlot) -> String {
    let f = Frame::new(plot);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        s,
        r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
        WIDTH / 2.0,
        escape(&plot.title)
    );
    let axis = r#"stroke="black""#;
    f.line(&mut s, (f.x0, f.y0), (f.x1, f.y0), axis);
    f.line(&mut s, (f.x0, f.y0), (f.x0, f.y1), axis);
    for (v, anchor) in [(f.x0, "start"), (f.x1, "end")] {
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="{anchor}">{v:.3}</text>"#,
            f.sx(v),
            HEIGHT - MARGIN + 16.0
        );
    }
    for v in [f.y0, f.y1] {
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{v:.3}</text>"#,
            MARGIN - 4.0,
            f.sy(v)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        HEIGHT - 16.0,
        escape(&plot.x_label)
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{:.1}" text-anchor="middle" transform="rotate(-90 16 {:.1})">{}</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        escape(&plot.y_label)
    );
    if plot.diagonal {
        f.line(
            &mut s,
            (f.x0, f.x0),
            (f.x1, f.x1),
            r#"stroke="grey" stroke-dasharray="4 4""#,
        );
    }
    for (i, series) in plot.series.iter().enumerate() {
        let colour = COLOURS[i % COLOURS.len()];
        let _ = writeln!(
            s,
            r#"<g class="series" data-name="{}">"#,
            escape(&series.name)
        );
        for &(x, y) in &series.points {
            let _ = writeln!(
                s,
                r#"<circle cx="{:.2}" cy="{:.2}" r="3.5" fill="{colour}"/>"#,
                f.sx(x),
                f.sy(y)
            );
        }
        if let Some((slope, icept)) = least_squares(&series.points) {
            let (lo, hi) = series
                .points
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
                    (lo.min(p.0), hi.max(p.0))
                });
            let style = format!(r#"class="trend" data-slope="{slope}" stroke="{colour}""#);
            f.line(
                &mut s,
                (lo, slope * lo + icept),
                (hi, slope * hi + icept),
                &style,
            );
        }
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" fill="{colour}">{}</text>"#,
            WIDTH - MARGIN + 6.0,
            MARGIN + 16.0 * i as f64,
            escape(&series.name)
        );
        s.push_str("</g>\n");
    }
    s.push_str("</svg>\n");
    s
}

/// L against MATTR with one series per method, plus an L-vs-L plot for
/// every method pair. Returns the written paths.
pub fn emit_plots(dir: &Path, input: &AnalysisInput) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    let series = input
        .surprisal
        .iter()
        .map(|(method, values)| Series {
            name: method.to_string(),
            points: values
                .iter()
                .filter_map(|(lang, &l)| Some((measure(input.profiles.get(lang)?, "mattr")?, l)))
                .collect(),
        })
        .collect();
    let main = ScatterPlot {
        title: "Surprisal per verse against MATTR".into(),
        x_label: "MATTR".into(),
        y_label: "L (bits per verse)".into(),
        series,
        diagonal: false,
    };
    let path = dir.join("l_vs_mattr.svg");
    write_file(&path, render_svg(&main))?;
    written.push(path);

    for (i, (m2, v2)) in input.surprisal.iter().enumerate() {
        for (m1, v1) in &input.surprisal[i + 1..] {
            let points = v1
                .iter()
                .filter_map(|(lang, &a)| Some((a, *v2.get(lang)?)))
                .collect();
            let plot = ScatterPlot {
                title: format!("{m1} against {m2}"),
                x_label: format!("L {m1}"),
                y_label: format!("L {m2}"),
                series: vec![Series {
                    name: "languages".into(),
                    points,
                }],
                diagonal: true,
            };
            let path = dir.join(format!("pair_{m1}_{m2}.svg"));
            write_file(&path, render_svg(&plot))?;
            written.push(path);
        }
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trend_line_fit() {
        let (m, b) = least_squares(&[(0.0, 1.0), (1.0, 3.0), (2.0, 5.0)]).unwrap();
        assert!((m - 2.0).abs() < 1e-12 && (b - 1.0).abs() < 1e-12);
        assert_eq!(least_squares(&[(1.0, 2.0)]), None);
        assert_eq!(least_squares(&[(1.0, 2.0), (1.0, 3.0)]), None);
    }

    #[test]
    fn single_point_and_escaping() {
        let plot = ScatterPlot {
            title: "a < b & c".into(),
            x_label: "x".into(),
            y_label: "y".into(),
            series: vec![Series {
                name: "bpe".into(),
                points: vec![(0.5, 100.0)],
            }],
            diagonal: false,
        };
        let svg = render_svg(&plot);
        assert_eq!(svg.matches("<circle").count(), 1);
        assert!(!svg.contains("class=\"trend\""));
        assert!(svg.contains("a &lt; b &amp; c"));
    }

    #[test]
    fn diagonal_point() {
        let plot = ScatterPlot {
            title: "pair".into(),
            x_label: "x".into(),
            y_label: "y".into(),
            series: vec![Series {
                name: "languages".into(),
                points: vec![(10.0, 10.0), (20.0, 20.0)],
            }],
            diagonal: true,
        };
        let svg = render_svg(&plot);
        // Points with equal coordinates map to the same screen offset
        // from the frame corner along both axes.
        let f = Frame::new(&plot);
        assert!(
            (f.sx(10.0)
                - MARGIN
                - (HEIGHT - MARGIN - f.sy(10.0)) * (WIDTH - 2.0 * MARGIN)
                    / (HEIGHT - 2.0 * MARGIN))
                .abs()
                < 1e-9
        );
        assert!(svg.contains("stroke-dasharray"));
    }
}
