//! Standalone SVG rendering of an exceedance curve with its pointwise band.

use std::fmt::Write;

use exceedance::{EpCurve, ParameterInterval};

use crate::format::sig9;

const MARGIN_LEFT: f64 = 72.0;
const MARGIN_RIGHT: f64 = 28.0;
const MARGIN_TOP: f64 = 36.0;
const MARGIN_BOTTOM: f64 = 64.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlotOptions {
    pub width: u32,
    pub height: u32,
}

impl Default for PlotOptions {
    fn default() -> Self {
        Self {
            width: 800,
            height: 500,
        }
    }
}

/// Maps data coordinates onto the plot area.
struct Frame {
    x0: f64,
    y0: f64,
    w: f64,
    h: f64,
    x_min: f64,
    x_max: f64,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        self.x0 + (x - self.x_min) / (self.x_max - self.x_min) * self.w
    }

    fn py(&self, p: f64) -> f64 {
        self.y0 + (1.0 - p) * self.h
    }
}

fn coord(v: f64) -> String {
    format!("{v:.3}")
}

/// Tick positions at 1, 2 or 5 times a power of ten.
fn ticks(lo: f64, hi: f64) -> (Vec<f64>, usize) {
    let raw = (hi - lo) / 6.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag);
    let decimals = (-step.log10().floor()).max(0.0) as usize;
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    ((first..=last).map(|k| k as f64 * step).collect(), decimals)
}

/// Renders `curve`, with `half_width` setting the x range when the curve
/// has a single cutoff. `marker` draws the parameter interval at height 0.5.
pub fn render_svg(
    curve: &EpCurve,
    marker: Option<&ParameterInterval>,
    half_width: f64,
    options: PlotOptions,
) -> String {
    let (x_min, x_max) = if curve.len() >= 2 {
        (curve.cutoffs[0], curve.cutoffs[curve.len() - 1])
    } else {
        (curve.cutoffs[0] - half_width, curve.cutoffs[0] + half_width)
    };
    let (width, height) = (options.width as f64, options.height as f64);
    let frame = Frame {
        x0: MARGIN_LEFT,
        y0: MARGIN_TOP,
        w: width - MARGIN_LEFT - MARGIN_RIGHT,
        h: height - MARGIN_TOP - MARGIN_BOTTOM,
        x_min,
        x_max,
    };

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}" font-family="sans-serif" font-size="12">"#,
        options.width, options.height, options.width, options.height
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<g class="plot-area" data-x-min="{}" data-x-max="{}" data-y-min="0" data-y-max="1" data-left="{}" data-top="{}" data-width="{}" data-height="{}">"#,
        sig9(x_min),
        sig9(x_max),
        coord(frame.x0),
        coord(frame.y0),
        coord(frame.w),
        coord(frame.h)
    );

    if curve.len() >= 2 {
        let upper = curve.iter().map(|(c, e)| (c, e.upper));
        let lower = curve.iter().rev().map(|(c, e)| (c, e.lower));
        let points: Vec<String> = upper
            .chain(lower)
            .map(|(c, p)| format!("{},{}", coord(frame.px(c)), coord(frame.py(p))))
            .collect();
        let _ = writeln!(
            s,
            r##"<polygon class="band" points="{}" fill="#c8c8c8" stroke="none"/>"##,
            points.join(" ")
        );
        let points: Vec<String> = curve
            .iter()
            .map(|(c, e)| format!("{},{}", coord(frame.px(c)), coord(frame.py(e.point))))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline class="curve" points="{}" fill="none" stroke="black" stroke-width="2"/>"#,
            points.join(" ")
        );
    } else {
        let (c, e) = curve.iter().next().expect("non-empty curve");
        let x = coord(frame.px(c));
        let _ = writeln!(
            s,
            r##"<line class="interval" x1="{x}" y1="{}" x2="{x}" y2="{}" stroke="#808080" stroke-width="6"/>"##,
            coord(frame.py(e.lower)),
            coord(frame.py(e.upper))
        );
        let _ = writeln!(
            s,
            r#"<circle class="point" cx="{x}" cy="{}" r="4" fill="black"/>"#,
            coord(frame.py(e.point))
        );
    }

    if let Some(ci) = marker {
        let lo = ci.lower.max(x_min);
        let hi = ci.upper.min(x_max);
        let y = coord(frame.py(0.5));
        if lo <= hi {
            let _ = writeln!(
                s,
                r#"<line class="param-ci" x1="{}" y1="{y}" x2="{}" y2="{y}" stroke="black" stroke-width="1.5"/>"#,
                coord(frame.px(lo)),
                coord(frame.px(hi))
            );
        }
        if (x_min..=x_max).contains(&ci.estimate) {
            let _ = writeln!(
                s,
                r#"<circle class="param-estimate" cx="{}" cy="{y}" r="3.5" fill="black"/>"#,
                coord(frame.px(ci.estimate))
            );
        }
    }
    let _ = writeln!(
        s,
        r#"<rect class="frame" x="{}" y="{}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        coord(frame.x0),
        coord(frame.y0),
        coord(frame.w),
        coord(frame.h)
    );
    let _ = writeln!(s, "</g>");

    // axes
    let base = frame.y0 + frame.h;
    let (xt, decimals) = ticks(x_min, x_max);
    for t in xt {
        let x = coord(frame.px(t));
        let _ = writeln!(
            s,
            r#"<line x1="{x}" y1="{}" x2="{x}" y2="{}" stroke="black"/><text x="{x}" y="{}" text-anchor="middle">{:.*}</text>"#,
            coord(base),
            coord(base + 5.0),
            coord(base + 19.0),
            decimals,
            t
        );
    }
    for i in 0..=4 {
        let p = i as f64 * 0.25;
        let y = coord(frame.py(p));
        let _ = writeln!(
            s,
            r#"<line x1="{}" y1="{y}" x2="{}" y2="{y}" stroke="black"/><text x="{}" y="{y}" text-anchor="end" dominant-baseline="middle">{p:.2}</text>"#,
            coord(frame.x0 - 5.0),
            coord(frame.x0),
            coord(frame.x0 - 8.0)
        );
    }
    let _ = writeln!(
        s,
        r#"<text class="x-label" x="{}" y="{}" text-anchor="middle">cutoff c</text>"#,
        coord(frame.x0 + frame.w / 2.0),
        coord(height - 18.0)
    );
    let _ = writeln!(
        s,
        r#"<text class="y-label" x="18" y="{}" text-anchor="middle" transform="rotate(-90 18 {})">exceedance probability</text>"#,
        coord(frame.y0 + frame.h / 2.0),
        coord(frame.y0 + frame.h / 2.0)
    );
    let _ = writeln!(
        s,
        r#"<text class="annotation" x="{}" y="{}" text-anchor="end">α = {}, m = {}, n = {}, {} band</text>"#,
        coord(frame.x0 + frame.w),
        coord(frame.y0 - 12.0),
        trim_number(curve.alpha),
        curve.rep_size,
        curve.fit.n(),
        curve.side.as_str().replace('_', "-")
    );
    let _ = writeln!(s, "</svg>");
    s
}

/// Short human-readable form of a level such as 0.05.
fn trim_number(x: f64) -> String {
    let s = format!("{x:.6}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}
