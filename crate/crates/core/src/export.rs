//! Sampling drawable arcs and writing them out as SVG or CSV.

use std::f64::consts::{PI, TAU};
use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::geometry::{AngleSet, EllipseSpec, Point2};
use crate::trammel::TrammelConfig;

// Largest θ span sampled before chord-based refinement starts. Keeps the
// endpoints of a long arc from coinciding (a closed loop has zero chord).
const MAX_SEED_SPAN: f64 = PI / 16.0;
const MAX_SUBDIVISION_DEPTH: u32 = 48;

pub const CSV_HEADER: &str = "arc,theta_rad,x_mm,y_mm";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExportError {
    #[error("max chord must be positive and finite, got {0} mm")]
    MaxChord(f64),
    #[error("invalid page: {0}")]
    Page(String),
    #[error("trace leaves the printable area at θ = {theta} (page point {x:.3}, {y:.3})")]
    OutOfPage { theta: f64, x: f64, y: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PageSpec {
    width: f64,
    height: f64,
    margin: f64,
}

impl PageSpec {
    /// ISO 216 A4, portrait, no margin.
    pub const A4: PageSpec = PageSpec {
        width: 210.0,
        height: 297.0,
        margin: 0.0,
    };

    pub fn new(width: f64, height: f64, margin: f64) -> Result<Self, ExportError> {
        if !(width.is_finite() && height.is_finite() && width > 0.0 && height > 0.0) {
            return Err(ExportError::Page(format!(
                "size must be positive, got {width} × {height} mm"
            )));
        }
        if !(margin.is_finite() && margin >= 0.0 && margin < width.min(height) / 2.0) {
            return Err(ExportError::Page(format!(
                "margin {margin} mm must be in [0, {})",
                width.min(height) / 2.0
            )));
        }
        Ok(Self {
            width,
            height,
            margin,
        })
    }

    pub fn a4_with_margin(margin: f64) -> Result<Self, ExportError> {
        Self::new(Self::A4.width, Self::A4.height, margin)
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn height(&self) -> f64 {
        self.height
    }

    pub fn margin(&self) -> f64 {
        self.margin
    }

    pub fn rotated(&self) -> Self {
        Self {
            width: self.height,
            height: self.width,
            margin: self.margin,
        }
    }

    /// This page, or its rotation, whichever holds `e` with x horizontal.
    /// Portrait wins when both fit.
    pub fn oriented_for(&self, e: &EllipseSpec) -> Option<Self> {
        let fits = |p: &PageSpec| {
            2.0 * e.semi_x() <= p.width - 2.0 * p.margin
                && 2.0 * e.semi_y() <= p.height - 2.0 * p.margin
        };
        [*self, self.rotated()].into_iter().find(fits)
    }
}

/// True if the ellipse's bounding box fits inside the margins, in either
/// page orientation.
pub fn fits_page(e: &EllipseSpec, page: &PageSpec) -> bool {
    page.oriented_for(e).is_some()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceSample {
    pub theta: f64,
    pub point: Point2,
}

/// Pen samples for one drawable arc, with strictly increasing `theta`.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct Polyline {
    pub samples: Vec<TraceSample>,
}

impl Polyline {
    pub fn max_chord(&self) -> f64 {
        self.samples
            .windows(2)
            .map(|w| w[0].point.distance(w[1].point))
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct Trace {
    pub polylines: Vec<Polyline>,
}

impl Trace {
    pub fn is_empty(&self) -> bool {
        self.polylines.is_empty()
    }

    pub fn samples(&self) -> impl Iterator<Item = &TraceSample> {
        self.polylines.iter().flat_map(|p| p.samples.iter())
    }

    pub fn len(&self) -> usize {
        self.polylines.iter().map(|p| p.samples.len()).sum()
    }
}

/// Samples the pen over every arc of `domain` so consecutive points are at
/// most `max_chord` apart. Arc endpoints are always included. Two arcs that
/// meet at `0 ≡ 2π` are drawn as one polyline whose `theta` runs past `2π`.
pub fn sample_trace(
    cfg: &TrammelConfig,
    domain: &AngleSet,
    max_chord: f64,
) -> Result<Trace, ExportError> {
    if !(max_chord.is_finite() && max_chord > 0.0) {
        return Err(ExportError::MaxChord(max_chord));
    }
    let polylines = theta_spans(domain)
        .into_iter()
        .map(|(lo, hi)| sample_span(cfg, lo, hi, max_chord))
        .collect();
    Ok(Trace { polylines })
}

fn theta_spans(domain: &AngleSet) -> Vec<(f64, f64)> {
    let arcs = domain.arcs();
    let mut spans: Vec<(f64, f64)> = arcs.iter().map(|a| (a.lo, a.hi)).collect();
    if spans.len() >= 2 && arcs[0].lo == 0.0 && arcs[arcs.len() - 1].hi == TAU {
        let (_, head_hi) = spans.remove(0);
        let last = spans.last_mut().expect("at least one span remains");
        last.1 = TAU + head_hi;
    }
    spans
}

fn sample_span(cfg: &TrammelConfig, lo: f64, hi: f64, max_chord: f64) -> Polyline {
    let at = |theta: f64| TraceSample {
        theta,
        point: cfg.pen_at(theta),
    };
    let mut samples = vec![at(lo)];
    if hi > lo {
        let seeds = ((hi - lo) / MAX_SEED_SPAN).ceil().max(1.0) as usize;
        let seed_theta = |k: usize| {
            if k == seeds {
                hi
            } else {
                lo + (hi - lo) * k as f64 / seeds as f64
            }
        };
        for k in 0..seeds {
            refine_chord(
                &at,
                *samples.last().unwrap(),
                at(seed_theta(k + 1)),
                max_chord,
                0,
                &mut samples,
            );
        }
    }
    Polyline { samples }
}

// Appends samples strictly after `a`, ending with `b`.
fn refine_chord<F: Fn(f64) -> TraceSample>(
    at: &F,
    a: TraceSample,
    b: TraceSample,
    max_chord: f64,
    depth: u32,
    out: &mut Vec<TraceSample>,
) {
    let mid = 0.5 * (a.theta + b.theta);
    let splittable = depth < MAX_SUBDIVISION_DEPTH && mid > a.theta && mid < b.theta;
    if a.point.distance(b.point) > max_chord && splittable {
        let m = at(mid);
        refine_chord(at, a, m, max_chord, depth + 1, out);
        refine_chord(at, m, b, max_chord, depth + 1, out);
    } else {
        out.push(b);
    }
}

fn fixed(value: f64, decimals: usize) -> String {
    let s = format!("{value:.decimals$}");
    // avoid "-0.000"
    if s.starts_with('-') && s[1..].bytes().all(|c| c == b'0' || c == b'.') {
        s[1..].to_string()
    } else {
        s
    }
}

/// Renders the trace as a standalone SVG 1.1 document in millimetres.
///
/// The ellipse centre goes to the page centre and y points up on paper.
/// Every point must fall inside the margin box.
pub fn to_svg(trace: &Trace, page: &PageSpec) -> Result<String, ExportError> {
    let (w, h, m) = (page.width, page.height, page.margin);
    let mut body = String::new();
    for line in &trace.polylines {
        let mut points = Vec::with_capacity(line.samples.len());
        for s in &line.samples {
            let x = w / 2.0 + s.point.x;
            let y = h / 2.0 - s.point.y;
            if !(x >= m && x <= w - m && y >= m && y <= h - m) {
                return Err(ExportError::OutOfPage {
                    theta: s.theta,
                    x,
                    y,
                });
            }
            points.push(format!("{},{}", fixed(x, 3), fixed(y, 3)));
        }
        let _ = writeln!(
            body,
            "  <polyline fill=\"none\" stroke=\"black\" stroke-width=\"0.3\" stroke-linecap=\"round\" stroke-linejoin=\"round\" points=\"{}\"/>",
            points.join(" ")
        );
    }
    let (ws, hs) = (fixed(w, 3), fixed(h, 3));
    Ok(format!(
        "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n\
         <svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{ws}mm\" height=\"{hs}mm\" viewBox=\"0 0 {ws} {hs}\">\n\
         {body}</svg>\n"
    ))
}

/// One row per sample, `arc` numbering polylines from 0. Values carry nine
/// digits after the decimal point.
pub fn to_csv(trace: &Trace) -> String {
    let mut out = String::with_capacity(40 * (trace.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for (i, line) in trace.polylines.iter().enumerate() {
        for s in &line.samples {
            let _ = writeln!(
                out,
                "{i},{},{},{}",
                fixed(s.theta, 9),
                fixed(s.point.x, 9),
                fixed(s.point.y, 9)
            );
        }
    }
    out
}
