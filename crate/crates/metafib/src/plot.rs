//! Deterministic SVG scatterplots.
//!
//! The renderer maps data points to a fixed-size canvas and emits one
//! `<circle>` per point. Output is a pure function of the input: axis
//! ranges, tick positions, and coordinate formatting are all computed
//! deterministically, so identical inputs give byte-identical files.

use std::fmt::Write;

/// One scatter series: a label for the legend and its data points.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

/// A scatterplot description. Ranges default to the data's bounding box
/// with a small margin.
#[derive(Debug, Clone, PartialEq)]
pub struct PlotSpec {
    pub series: Vec<Series>,
    pub x_range: Option<(f64, f64)>,
    pub y_range: Option<(f64, f64)>,
    pub width: u32,
    pub height: u32,
    pub point_radius: f64,
}

impl PlotSpec {
    pub fn new(series: Vec<Series>) -> PlotSpec {
        PlotSpec {
            series,
            x_range: None,
            y_range: None,
            width: 960,
            height: 600,
            point_radius: 1.5,
        }
    }
}

/// Why a plot could not be rendered.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PlotError {
    #[error("plot has no series")]
    NoSeries,
    #[error("series {label:?} has no points")]
    EmptySeries { label: String },
    #[error("axis range is not finite")]
    BadRange,
}

const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
];
const MARGIN_LEFT: f64 = 64.0;
const MARGIN_RIGHT: f64 = 16.0;
const MARGIN_TOP: f64 = 18.0;
const MARGIN_BOTTOM: f64 = 42.0;

/// Data range of an axis: explicit if fixed, else the padded bounding box.
fn axis_range(
    fixed: Option<(f64, f64)>,
    values: impl Iterator<Item = f64>,
) -> Result<(f64, f64), PlotError> {
    let (lo, hi) = match fixed {
        Some(r) => r,
        None => {
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for v in values {
                lo = lo.min(v);
                hi = hi.max(v);
            }
            let pad = if lo == hi { 1.0 } else { (hi - lo) * 0.04 };
            (lo - pad, hi + pad)
        }
    };
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(PlotError::BadRange);
    }
    Ok((lo, hi))
}

/// Tick positions: a 1/2/5·10^k step sized for about five intervals.
fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let raw = (hi - lo) / 5.0;
    let magnitude = 10f64.powf(raw.log10().floor());
    let step = match raw / magnitude {
        m if m < 1.5 => magnitude,
        m if m < 3.0 => 2.0 * magnitude,
        m if m < 7.0 => 5.0 * magnitude,
        _ => 10.0 * magnitude,
    };
    let mut t = (lo / step).ceil() * step;
    let mut out = Vec::new();
    while t <= hi {
        // Snap near-zero ticks so labels read "0" rather than "1e-13".
        out.push(if t.abs() < step * 1e-9 { 0.0 } else { t });
        t += step;
    }
    out
}

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            _ => out.push(c),
        }
    }
    out
}

/// Renders the plot as a standalone SVG 1.1 document.
///
/// # Examples
///
/// ```
/// use metafib::plot::{render, PlotSpec, Series};
///
/// let spec = PlotSpec::new(vec![Series {
///     label: "single".into(),
///     points: vec![(1.0, 1.0)],
/// }]);
/// let svg = render(&spec).unwrap();
/// assert_eq!(svg.matches("<circle").count(), 1);
/// ```
pub fn render(spec: &PlotSpec) -> Result<String, PlotError> {
    if spec.series.is_empty() {
        return Err(PlotError::NoSeries);
    }
    if let Some(empty) = spec.series.iter().find(|s| s.points.is_empty()) {
        return Err(PlotError::EmptySeries {
            label: empty.label.clone(),
        });
    }
    let all = |pick: fn(&(f64, f64)) -> f64| {
        spec.series
            .iter()
            .flat_map(move |s| s.points.iter().map(pick))
    };
    let (x0, x1) = axis_range(spec.x_range, all(|p| p.0))?;
    let (y0, y1) = axis_range(spec.y_range, all(|p| p.1))?;
    let (w, h) = (f64::from(spec.width), f64::from(spec.height));
    let plot_w = w - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = h - MARGIN_TOP - MARGIN_BOTTOM;
    let map_x = |x: f64| MARGIN_LEFT + (x - x0) / (x1 - x0) * plot_w;
    let map_y = |y: f64| MARGIN_TOP + (1.0 - (y - y0) / (y1 - y0)) * plot_h;

    let mut svg = String::new();
    let out = &mut svg;
    writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#).unwrap();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{}" height="{}" viewBox="0 0 {} {}">"#,
        spec.width, spec.height, spec.width, spec.height
    )
    .unwrap();
    writeln!(out, r##"<rect width="{w}" height="{h}" fill="#ffffff"/>"##).unwrap();

    let (bottom, right) = (MARGIN_TOP + plot_h, MARGIN_LEFT + plot_w);
    writeln!(
        out,
        r##"<g stroke="#333333" stroke-width="1" fill="none">
<line x1="{MARGIN_LEFT}" y1="{bottom}" x2="{right}" y2="{bottom}"/>
<line x1="{MARGIN_LEFT}" y1="{MARGIN_TOP}" x2="{MARGIN_LEFT}" y2="{bottom}"/>
</g>"##
    )
    .unwrap();

    writeln!(
        out,
        r##"<g font-family="monospace" font-size="11" fill="#333333">"##
    )
    .unwrap();
    for t in ticks(x0, x1) {
        let x = map_x(t);
        writeln!(
            out,
            r##"<line x1="{x:.2}" y1="{bottom}" x2="{x:.2}" y2="{}" stroke="#333333"/>"##,
            bottom + 4.0
        )
        .unwrap();
        writeln!(
            out,
            r#"<text x="{x:.2}" y="{}" text-anchor="middle">{t}</text>"#,
            bottom + 16.0
        )
        .unwrap();
    }
    for t in ticks(y0, y1) {
        let y = map_y(t);
        writeln!(
            out,
            r##"<line x1="{}" y1="{y:.2}" x2="{MARGIN_LEFT}" y2="{y:.2}" stroke="#333333"/>"##,
            MARGIN_LEFT - 4.0
        )
        .unwrap();
        writeln!(
            out,
            r#"<text x="{}" y="{:.2}" text-anchor="end">{t}</text>"#,
            MARGIN_LEFT - 7.0,
            y + 3.5
        )
        .unwrap();
    }
    writeln!(out, "</g>").unwrap();

    for (i, series) in spec.series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        writeln!(out, r#"<g fill="{color}">"#).unwrap();
        for &(x, y) in &series.points {
            writeln!(
                out,
                r#"<circle cx="{:.2}" cy="{:.2}" r="{}"/>"#,
                map_x(x),
                map_y(y),
                spec.point_radius
            )
            .unwrap();
        }
        writeln!(out, "</g>").unwrap();
        writeln!(
            out,
            r#"<text x="{}" y="{}" font-family="monospace" font-size="12" fill="{color}" text-anchor="end">{}</text>"#,
            right,
            MARGIN_TOP + 14.0 * (i as f64 + 1.0) - 2.0,
            escape(&series.label)
        )
        .unwrap();
    }
    writeln!(out, "</svg>").unwrap();
    Ok(svg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(label: &str, points: Vec<(f64, f64)>) -> Series {
        Series {
            label: label.into(),
            points,
        }
    }

    #[test]
    fn single_point_renders_one_circle() {
        let svg = render(&PlotSpec::new(vec![series("p", vec![(1.0, 1.0)])])).unwrap();
        assert_eq!(svg.matches("<circle").count(), 1);
        assert!(svg.starts_with("<?xml"));
        assert!(svg.contains(r#"version="1.1""#));
        assert!(svg.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn every_point_maps_inside_the_plot_area() {
        let points: Vec<(f64, f64)> = (0..500)
            .map(|i| (i as f64, ((i * 7919) % 101) as f64))
            .collect();
        let spec = PlotSpec::new(vec![series("data", points)]);
        let svg = render(&spec).unwrap();
        assert_eq!(svg.matches("<circle").count(), 500);
        for part in svg.split("<circle").skip(1) {
            let cx: f64 = part
                .split("cx=\"")
                .nth(1)
                .and_then(|s| s.split('"').next())
                .unwrap()
                .parse()
                .unwrap();
            assert!(
                (MARGIN_LEFT..=960.0 - MARGIN_RIGHT).contains(&cx),
                "cx={cx}"
            );
        }
    }

    #[test]
    fn output_is_reproducible() {
        let make = || {
            let pts: Vec<(f64, f64)> = (1..=1000).map(|i| (i as f64, (i % 37) as f64)).collect();
            render(&PlotSpec::new(vec![series("q", pts)])).unwrap()
        };
        assert_eq!(make(), make());
    }

    #[test]
    fn degenerate_inputs_are_refused() {
        assert_eq!(render(&PlotSpec::new(vec![])), Err(PlotError::NoSeries));
        assert_eq!(
            render(&PlotSpec::new(vec![series("empty", vec![])])),
            Err(PlotError::EmptySeries {
                label: "empty".into()
            })
        );
        let mut spec = PlotSpec::new(vec![series("p", vec![(0.0, 0.0)])]);
        spec.x_range = Some((f64::NAN, 1.0));
        assert_eq!(render(&spec), Err(PlotError::BadRange));
    }

    #[test]
    fn labels_are_xml_escaped() {
        let svg = render(&PlotSpec::new(vec![series("a<b&c", vec![(1.0, 2.0)])])).unwrap();
        assert!(svg.contains("a&lt;b&amp;c"));
        assert!(!svg.contains("a<b"));
    }

    #[test]
    fn fixed_ranges_override_the_data_box() {
        let mut spec = PlotSpec::new(vec![series("p", vec![(5.0, 5.0)])]);
        spec.x_range = Some((0.0, 10.0));
        spec.y_range = Some((0.0, 10.0));
        let svg = render(&spec).unwrap();
        // The single point sits at the canvas centre.
        let cx = MARGIN_LEFT + (960.0 - MARGIN_LEFT - MARGIN_RIGHT) / 2.0;
        assert!(svg.contains(&format!(r#"cx="{cx:.2}""#)));
    }

    #[test]
    fn ticks_use_round_steps() {
        assert_eq!(ticks(0.0, 10.0), vec![0.0, 2.0, 4.0, 6.0, 8.0, 10.0]);
        assert_eq!(
            ticks(0.0, 1.0),
            vec![0.0, 0.2, 0.4, 0.6000000000000001, 0.8, 1.0]
        );
        let t = ticks(-0.3, 0.7);
        assert!(t.contains(&0.0), "{t:?}");
    }
}
