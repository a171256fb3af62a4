//! Planar geometry shared by the rest of the crate: points, axis-aligned
//! ellipses with their foci, and closed arc sets on the circle of rod angles.

use std::f64::consts::TAU;

use serde::Serialize;
use thiserror::Error;

/// One LEGO stud in millimetres.
pub const STUD_MM: f64 = 8.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("coordinate is not finite: ({x}, {y})")]
    NonFinite { x: f64, y: f64 },
    #[error("semi-axis must be positive and finite, got {0}")]
    SemiAxis(f64),
    #[error("tolerance `{name}` must be positive and finite, got {value}")]
    Tolerance { name: &'static str, value: f64 },
}

/// Maps an angle into `[0, 2π)`.
pub fn normalize_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if t >= TAU {
        0.0
    } else {
        t
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const ORIGIN: Point2 = Point2 { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Result<Self, GeometryError> {
        if x.is_finite() && y.is_finite() {
            Ok(Self { x, y })
        } else {
            Err(GeometryError::NonFinite { x, y })
        }
    }

    pub fn distance(self, other: Point2) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    /// z-component of `self × other`, treating both as vectors.
    pub fn cross(self, other: Point2) -> f64 {
        self.x * other.y - self.y * other.x
    }
}

impl std::ops::Sub for Point2 {
    type Output = Point2;

    fn sub(self, other: Point2) -> Point2 {
        Point2 {
            x: self.x - other.x,
            y: self.y - other.y,
        }
    }
}

/// Axis-aligned ellipse.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EllipseSpec {
    semi_x: f64,
    semi_y: f64,
    center: Point2,
}

impl EllipseSpec {
    /// Ellipse centred at the origin.
    pub fn new(semi_x: f64, semi_y: f64) -> Result<Self, GeometryError> {
        Self::with_center(semi_x, semi_y, Point2::ORIGIN)
    }

    pub fn with_center(semi_x: f64, semi_y: f64, center: Point2) -> Result<Self, GeometryError> {
        for v in [semi_x, semi_y] {
            if !(v.is_finite() && v > 0.0) {
                return Err(GeometryError::SemiAxis(v));
            }
        }
        let center = Point2::new(center.x, center.y)?;
        Ok(Self {
            semi_x,
            semi_y,
            center,
        })
    }

    pub fn semi_x(&self) -> f64 {
        self.semi_x
    }

    pub fn semi_y(&self) -> f64 {
        self.semi_y
    }

    pub fn center(&self) -> Point2 {
        self.center
    }

    /// The larger semi-axis; the focal sum of any point on the curve is twice this.
    pub fn major_semi_axis(&self) -> f64 {
        self.semi_x.max(self.semi_y)
    }

    pub fn point_at(&self, theta: f64) -> Point2 {
        Point2 {
            x: self.center.x + self.semi_x * theta.cos(),
            y: self.center.y + self.semi_y * theta.sin(),
        }
    }

    /// `((x-cx)/a)^2 + ((y-cy)/b)^2 - 1`; zero exactly on the curve.
    pub fn implicit_residual(&self, p: Point2) -> f64 {
        let u = (p.x - self.center.x) / self.semi_x;
        let v = (p.y - self.center.y) / self.semi_y;
        u * u + v * v - 1.0
    }

    /// Foci on the longer axis. A circle reports its centre twice.
    pub fn foci(&self) -> (Point2, Point2) {
        let (a, b) = (self.semi_x, self.semi_y);
        let c = (a * a - b * b).abs().sqrt();
        let Point2 { x: cx, y: cy } = self.center;
        if a >= b {
            (Point2 { x: cx + c, y: cy }, Point2 { x: cx - c, y: cy })
        } else {
            (Point2 { x: cx, y: cy + c }, Point2 { x: cx, y: cy - c })
        }
    }

    pub fn focal_sum(&self, p: Point2) -> f64 {
        let (f1, f2) = self.foci();
        p.distance(f1) + p.distance(f2)
    }
}

/// Numerical tolerances used by the verification paths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub residual_tol: f64,
    pub solver_tol: f64,
    pub angle_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            residual_tol: 1e-12,
            solver_tol: 1e-9,
            angle_tol: 1e-6,
        }
    }
}

impl Tolerances {
    pub fn new(residual_tol: f64, solver_tol: f64, angle_tol: f64) -> Result<Self, GeometryError> {
        for (name, value) in [
            ("residual_tol", residual_tol),
            ("solver_tol", solver_tol),
            ("angle_tol", angle_tol),
        ] {
            if !(value.is_finite() && value > 0.0) {
                return Err(GeometryError::Tolerance { name, value });
            }
        }
        Ok(Self {
            residual_tol,
            solver_tol,
            angle_tol,
        })
    }
}

/// A closed arc `[lo, hi]` with `0 <= lo <= hi <= 2π`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AngleArc {
    pub lo: f64,
    pub hi: f64,
}

impl AngleArc {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, theta: f64) -> bool {
        self.lo <= theta && theta <= self.hi
    }
}

/// Union of disjoint closed arcs on the circle of rod angles.
///
/// Arcs are kept sorted, pairwise disjoint and inside `[0, 2π]`. An arc that
/// wraps past zero is stored as two pieces, `[lo, 2π]` and `[0, hi]`.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct AngleSet {
    arcs: Vec<AngleArc>,
}

impl AngleSet {
    pub fn empty() -> Self {
        Self { arcs: Vec::new() }
    }

    pub fn full() -> Self {
        Self {
            arcs: vec![AngleArc { lo: 0.0, hi: TAU }],
        }
    }

    /// Builds a set from counter-clockwise arcs `(start, end)`.
    ///
    /// `start` may be any finite angle; the arc runs from `start` to `end`
    /// and must have `end >= start`. Arcs of width `>= 2π` give the full
    /// circle. Overlapping or touching arcs are merged.
    pub fn from_arcs<I>(arcs: I) -> Self
    where
        I: IntoIterator<Item = (f64, f64)>,
    {
        let mut pieces = Vec::new();
        for (start, end) in arcs {
            let width = end - start;
            debug_assert!(width >= 0.0, "arc end precedes start");
            if width.is_nan() || width < 0.0 {
                continue;
            }
            if width >= TAU {
                return Self::full();
            }
            let lo = normalize_angle(start);
            let hi = lo + width;
            if hi > TAU {
                pieces.push(AngleArc { lo, hi: TAU });
                pieces.push(AngleArc {
                    lo: 0.0,
                    hi: hi - TAU,
                });
            } else {
                pieces.push(AngleArc { lo, hi });
            }
        }
        Self::from_pieces(pieces)
    }

    fn from_pieces(mut pieces: Vec<AngleArc>) -> Self {
        pieces.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        let mut arcs: Vec<AngleArc> = Vec::with_capacity(pieces.len());
        for p in pieces {
            match arcs.last_mut() {
                Some(last) if p.lo <= last.hi => last.hi = last.hi.max(p.hi),
                _ => arcs.push(p),
            }
        }
        Self { arcs }
    }

    pub fn arcs(&self) -> &[AngleArc] {
        &self.arcs
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    pub fn is_full(&self) -> bool {
        matches!(self.arcs.as_slice(), [a] if a.lo == 0.0 && a.hi == TAU)
    }

    pub fn measure(&self) -> f64 {
        self.arcs.iter().map(AngleArc::width).sum()
    }

    /// Closed-boundary membership; `theta` is normalized first.
    pub fn contains(&self, theta: f64) -> bool {
        let t = normalize_angle(theta);
        self.arcs.iter().any(|a| a.contains(t))
    }

    /// Closure of the complement. Boundary angles belong to both sets.
    pub fn complement(&self) -> Self {
        let mut out = Vec::with_capacity(self.arcs.len() + 1);
        let mut cursor = 0.0;
        for a in &self.arcs {
            if a.lo > cursor {
                out.push(AngleArc {
                    lo: cursor,
                    hi: a.lo,
                });
            }
            cursor = a.hi;
        }
        if cursor < TAU {
            out.push(AngleArc {
                lo: cursor,
                hi: TAU,
            });
        }
        Self { arcs: out }
    }

    pub fn union(&self, other: &AngleSet) -> Self {
        Self::from_pieces(self.arcs.iter().chain(&other.arcs).copied().collect())
    }

    pub fn intersection(&self, other: &AngleSet) -> Self {
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < self.arcs.len() && j < other.arcs.len() {
            let (a, b) = (self.arcs[i], other.arcs[j]);
            let lo = a.lo.max(b.lo);
            let hi = a.hi.min(b.hi);
            if lo <= hi {
                out.push(AngleArc { lo, hi });
            }
            if a.hi < b.hi {
                i += 1;
            } else {
                j += 1;
            }
        }
        Self::from_pieces(out)
    }

    /// Measure of `self \ other`.
    pub fn difference_measure(&self, other: &AngleSet) -> f64 {
        self.intersection(&other.complement()).measure()
    }

    /// Measure of the symmetric difference; zero for equal sets.
    pub fn symmetric_difference_measure(&self, other: &AngleSet) -> f64 {
        self.difference_measure(other) + other.difference_measure(self)
    }

    /// Image under `θ ↦ θ + shift`.
    pub fn rotated(&self, shift: f64) -> Self {
        Self::from_arcs(self.arcs.iter().map(|a| (a.lo + shift, a.hi + shift)))
    }

    /// Image under `θ ↦ axis - θ`.
    pub fn reflected(&self, axis: f64) -> Self {
        Self::from_arcs(self.arcs.iter().map(|a| (axis - a.hi, axis - a.lo)))
    }
}
