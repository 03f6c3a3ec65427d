//! Minimal SVG line and grouped-bar charts.

use std::fmt::Write as _;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 60.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;

const PALETTE: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf",
];

fn color(i: usize) -> &'static str {
    PALETTE[i % PALETTE.len()]
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

struct Frame {
    x_range: (f64, f64),
    y_range: (f64, f64),
}

impl Frame {
    fn plot_w() -> f64 {
        WIDTH - LEFT - RIGHT
    }

    fn plot_h() -> f64 {
        HEIGHT - TOP - BOTTOM
    }

    fn x(&self, v: f64) -> f64 {
        let (lo, hi) = self.x_range;
        let span = if hi > lo { hi - lo } else { 1.0 };
        LEFT + (v - lo) / span * Self::plot_w()
    }

    fn y(&self, v: f64) -> f64 {
        let (lo, hi) = self.y_range;
        let span = if hi > lo { hi - lo } else { 1.0 };
        TOP + Self::plot_h() - (v - lo) / span * Self::plot_h()
    }
}

fn header(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{}" y="20" text-anchor="middle" font-size="14">{}</text>"#,
        LEFT + Frame::plot_w() / 2.0,
        escape(title)
    );
}

fn axes(out: &mut String, frame: &Frame, x_label: &str, y_label: &str, x_ticks: &[(f64, String)]) {
    let (x0, x1) = (LEFT, LEFT + Frame::plot_w());
    let (y0, y1) = (TOP + Frame::plot_h(), TOP);
    let _ = writeln!(
        out,
        r#"<path d="M{x0:.2},{y1:.2} L{x0:.2},{y0:.2} L{x1:.2},{y0:.2}" fill="none" stroke="black"/>"#
    );
    for i in 0..=5 {
        let v = frame.y_range.0 + (frame.y_range.1 - frame.y_range.0) * i as f64 / 5.0;
        let y = frame.y(v);
        let _ = writeln!(
            out,
            r##"<line x1="{x0:.2}" y1="{y:.2}" x2="{x1:.2}" y2="{y:.2}" stroke="#ddd"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"##,
            x0 - 4.0,
            y + 4.0,
            tick_label(v)
        );
    }
    for (v, label) in x_ticks {
        let x = frame.x(*v);
        let _ = writeln!(
            out,
            r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            y0 + 15.0,
            escape(label)
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        LEFT + Frame::plot_w() / 2.0,
        HEIGHT - 12.0,
        escape(x_label)
    );
    let _ = writeln!(
        out,
        r#"<text transform="translate(16,{:.2}) rotate(-90)" text-anchor="middle">{}</text>"#,
        TOP + Frame::plot_h() / 2.0,
        escape(y_label)
    );
}

fn tick_label(v: f64) -> String {
    let s = format!("{v:.2}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

fn legend(out: &mut String, names: &[String]) {
    let x = LEFT + Frame::plot_w() + 12.0;
    for (i, name) in names.iter().enumerate() {
        let y = TOP + 14.0 * i as f64;
        let _ = writeln!(
            out,
            r#"<rect x="{x:.2}" y="{:.2}" width="10" height="10" fill="{}"/><text x="{:.2}" y="{:.2}">{}</text>"#,
            y,
            color(i),
            x + 14.0,
            y + 9.0,
            escape(name)
        );
    }
}

pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

pub struct LineChart {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
    /// Optional categorical tick labels at the given x positions.
    pub x_ticks: Option<Vec<(f64, String)>>,
    pub series: Vec<Series>,
}

impl LineChart {
    pub fn render(&self) -> String {
        let frame = Frame {
            x_range: self.x_range,
            y_range: self.y_range,
        };
        let mut out = String::new();
        header(&mut out, &self.title);
        let ticks = self.x_ticks.clone().unwrap_or_else(|| {
            (0..=5)
                .map(|i| {
                    let v = self.x_range.0 + (self.x_range.1 - self.x_range.0) * i as f64 / 5.0;
                    (v, tick_label(v))
                })
                .collect()
        });
        axes(&mut out, &frame, &self.x_label, &self.y_label, &ticks);
        for (i, s) in self.series.iter().enumerate() {
            let d = s
                .points
                .iter()
                .enumerate()
                .map(|(k, &(x, y))| {
                    format!("{}{:.2},{:.2}", if k == 0 { 'M' } else { 'L' }, frame.x(x), frame.y(y))
                })
                .collect::<Vec<_>>()
                .join(" ");
            let _ = writeln!(
                out,
                r#"<path d="{d}" fill="none" stroke="{}" stroke-width="1.5"/>"#,
                color(i)
            );
        }
        legend(
            &mut out,
            &self.series.iter().map(|s| s.name.clone()).collect::<Vec<_>>(),
        );
        out.push_str("</svg>\n");
        out
    }
}

/// Bars grouped by category, one bar per series within each group.
pub struct BarChart {
    pub title: String,
    pub y_label: String,
    pub categories: Vec<String>,
    pub series: Vec<(String, Vec<f64>)>,
}

impl BarChart {
    pub fn render(&self) -> String {
        let max = self
            .series
            .iter()
            .flat_map(|(_, v)| v.iter().copied())
            .filter(|v| v.is_finite())
            .fold(0.0f64, f64::max);
        let frame = Frame {
            x_range: (0.0, self.categories.len().max(1) as f64),
            y_range: (0.0, if max > 0.0 { max * 1.05 } else { 1.0 }),
        };
        let mut out = String::new();
        header(&mut out, &self.title);
        let ticks: Vec<(f64, String)> = self
            .categories
            .iter()
            .enumerate()
            .map(|(i, c)| (i as f64 + 0.5, c.clone()))
            .collect();
        axes(&mut out, &frame, "", &self.y_label, &ticks);
        let n = self.series.len().max(1) as f64;
        let slot = 0.8 / n;
        for (si, (_, values)) in self.series.iter().enumerate() {
            for (ci, v) in values.iter().enumerate() {
                if !v.is_finite() {
                    continue;
                }
                let x_lo = frame.x(ci as f64 + 0.1 + slot * si as f64);
                let x_hi = frame.x(ci as f64 + 0.1 + slot * (si as f64 + 1.0));
                let y = frame.y(*v);
                let _ = writeln!(
                    out,
                    r#"<rect x="{x_lo:.2}" y="{y:.2}" width="{:.2}" height="{:.2}" fill="{}"/>"#,
                    (x_hi - x_lo).max(0.5),
                    (frame.y(0.0) - y).max(0.0),
                    color(si)
                );
            }
        }
        legend(
            &mut out,
            &self.series.iter().map(|(n, _)| n.clone()).collect::<Vec<_>>(),
        );
        out.push_str("</svg>\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_chart_has_one_path_per_series() {
        let chart = LineChart {
            title: "F <score>".into(),
            x_label: "threshold".into(),
            y_label: "F".into(),
            x_range: (0.0, 100.0),
            y_range: (0.0, 1.0),
            x_ticks: None,
            series: vec![
                Series { name: "a".into(), points: vec![(0.0, 0.1), (100.0, 0.9)] },
                Series { name: "b&c".into(), points: vec![(0.0, 0.5)] },
            ],
        };
        let svg = chart.render();
        assert_eq!(svg.matches("stroke-width=\"1.5\"").count(), 2);
        assert!(svg.contains("F &lt;score&gt;"));
        assert!(svg.contains("b&amp;c"));
        assert!(svg.ends_with("</svg>\n"));
    }

    #[test]
    fn bar_chart_skips_non_finite() {
        let chart = BarChart {
            title: "speed".into(),
            y_label: "ms".into(),
            categories: vec!["x".into(), "y".into()],
            series: vec![("init".into(), vec![1.0, f64::NAN])],
        };
        // one bar plus the background rect and one legend swatch
        assert_eq!(chart.render().matches("<rect").count(), 3);
    }
}
