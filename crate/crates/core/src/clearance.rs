//! Where the trammel cannot draw.
//!
//! Each shuttle is modelled by its tile's bounding box, centred on its pivot
//! with the long side along its channel. A rod angle is forbidden when the
//! two boxes touch or overlap, or when a shuttle would run off the end of
//! its channel.

use std::f64::consts::TAU;

use serde::Serialize;

use crate::exec::Exec;
use crate::geometry::{normalize_angle, AngleSet, Point2, STUD_MM};
use crate::trammel::{ConfigError, TrammelConfig};

/// Number of uniform grid angles scanned before boundary refinement.
pub const SCAN_POINTS: usize = 4096;

// Bisection stops at `tol` or after this many halvings of a grid cell.
const MAX_BISECTIONS: usize = 64;

/// Shuttle bounding box: `length` along its channel, `width` across it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShuttleFootprint {
    pub length: f64,
    pub width: f64,
}

impl Default for ShuttleFootprint {
    /// A 1×4 flat tile.
    fn default() -> Self {
        Self {
            length: 4.0 * STUD_MM,
            width: STUD_MM,
        }
    }
}

impl ShuttleFootprint {
    pub fn new(length: f64, width: f64) -> Result<Self, ConfigError> {
        for (field, value) in [("length", length), ("width", width)] {
            if !(value.is_finite() && value >= 0.0) {
                return Err(ConfigError::Shuttle { field, value });
            }
        }
        Ok(Self { length, width })
    }

    /// Centre distance below which two perpendicular shuttles meet,
    /// `(length + width) / 2`.
    pub fn contact_distance(&self) -> f64 {
        (self.length + self.width) / 2.0
    }
}

/// Closed axis-aligned rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Rect {
    pub min: Point2,
    pub max: Point2,
}

impl Rect {
    pub fn centered(center: Point2, half_x: f64, half_y: f64) -> Self {
        Self {
            min: Point2 {
                x: center.x - half_x,
                y: center.y - half_y,
            },
            max: Point2 {
                x: center.x + half_x,
                y: center.y + half_y,
            },
        }
    }

    pub fn center(&self) -> Point2 {
        Point2 {
            x: (self.min.x + self.max.x) / 2.0,
            y: (self.min.y + self.max.y) / 2.0,
        }
    }

    /// Overlap including contact along an edge or corner.
    pub fn touches(&self, other: &Rect) -> bool {
        self.min.x <= other.max.x
            && other.min.x <= self.max.x
            && self.min.y <= other.max.y
            && other.min.y <= self.max.y
    }
}

/// Boxes of the x-channel shuttle and the y-channel shuttle at `theta`.
pub fn shuttle_rects(cfg: &TrammelConfig, theta: f64) -> (Rect, Rect) {
    let st = cfg.rod_state(theta);
    let sh = cfg.shuttle();
    (
        Rect::centered(st.pivot_x, sh.length / 2.0, sh.width / 2.0),
        Rect::centered(st.pivot_y, sh.width / 2.0, sh.length / 2.0),
    )
}

pub fn collides(cfg: &TrammelConfig, theta: f64) -> bool {
    let (c, d) = shuttle_rects(cfg, theta);
    c.touches(&d)
}

/// True when either shuttle extends past the end of its channel.
pub fn overruns(cfg: &TrammelConfig, theta: f64) -> bool {
    let limit = cfg.channel_half_length() - cfg.shuttle().length / 2.0;
    let st = cfg.rod_state(theta);
    st.pivot_x.x.abs() > limit || st.pivot_y.y.abs() > limit
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Cause {
    Collision,
    Overrun,
    /// Collision and overrun arcs overlap and were merged.
    Both,
}

impl Cause {
    pub fn as_str(&self) -> &'static str {
        match self {
            Cause::Collision => "collision",
            Cause::Overrun => "overrun",
            Cause::Both => "collision+overrun",
        }
    }
}

/// One forbidden arc. `lo` lies in `[0, 2π)`; `hi >= lo` may pass `2π` when
/// the arc wraps through zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ForbiddenArc {
    pub lo: f64,
    pub hi: f64,
    pub cause: Cause,
}

impl ForbiddenArc {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClearanceReport {
    pub forbidden: AngleSet,
    pub drawable_fraction: f64,
    pub boundaries: Vec<ForbiddenArc>,
}

impl ClearanceReport {
    fn from_arcs(boundaries: Vec<ForbiddenArc>) -> Self {
        let forbidden = AngleSet::from_arcs(boundaries.iter().map(|a| (a.lo, a.hi)));
        let drawable_fraction = (1.0 - forbidden.measure() / TAU).clamp(0.0, 1.0);
        Self {
            forbidden,
            drawable_fraction,
            boundaries,
        }
    }

    pub fn drawable(&self) -> AngleSet {
        self.forbidden.complement()
    }
}

/// Forbidden rod angles with the default execution strategy.
pub fn forbidden_arcs(cfg: &TrammelConfig, tol: f64) -> ClearanceReport {
    forbidden_arcs_with(cfg, tol, Exec::default())
}

/// Scans [`SCAN_POINTS`] uniform angles, then bisects every state change to
/// within `tol`. Refined boundaries are taken on the free side, so each
/// reported arc covers its true forbidden interval.
///
/// Features narrower than one grid cell (`2π / 4096`) can be missed.
pub fn forbidden_arcs_with(cfg: &TrammelConfig, tol: f64, exec: Exec) -> ClearanceReport {
    assert!(tol > 0.0, "bisection tolerance must be positive");
    let n = SCAN_POINTS;
    let step = TAU / n as f64;
    let angle = |i: usize| step * i as f64;
    let blocked = |t: f64| collides(cfg, t) || overruns(cfg, t);
    let grid: Vec<bool> = exec.map_indices(n, |i| blocked(angle(i)));

    let Some(first_free) = grid.iter().position(|b| !b) else {
        let cause = run_cause(cfg, 0.0, TAU);
        return ClearanceReport::from_arcs(vec![ForbiddenArc {
            lo: 0.0,
            hi: TAU,
            cause,
        }]);
    };

    // Walk once around the circle starting from a free grid point so that
    // every forbidden run has both a rising and a falling edge.
    let mut arcs = Vec::new();
    let mut run_start: Option<f64> = None;
    for k in 0..n {
        let i = first_free + k;
        let (a, b) = (angle(i), angle(i + 1));
        let (here, next) = (grid[i % n], grid[(i + 1) % n]);
        match (here, next) {
            (false, true) => run_start = Some(refine(&blocked, a, b, false, tol)),
            (true, false) => {
                let lo = run_start.take().expect("run opened before it closes");
                let hi = refine(&blocked, a, b, true, tol);
                arcs.push((lo, hi));
            }
            _ => {}
        }
    }

    let boundaries = arcs
        .into_iter()
        .map(|(lo, hi)| {
            let cause = run_cause(cfg, lo, hi);
            let start = normalize_angle(lo);
            ForbiddenArc {
                lo: start,
                hi: start + (hi - lo),
                cause,
            }
        })
        .collect();
    ClearanceReport::from_arcs(boundaries)
}

/// Bisects the state change inside `[a, b]` and returns the endpoint on the
/// free side. `blocked_at_a` is the state at `a`.
fn refine<F: Fn(f64) -> bool>(
    blocked: &F,
    mut a: f64,
    mut b: f64,
    blocked_at_a: bool,
    tol: f64,
) -> f64 {
    for _ in 0..MAX_BISECTIONS {
        if b - a <= tol {
            break;
        }
        let mid = 0.5 * (a + b);
        if blocked(mid) == blocked_at_a {
            a = mid;
        } else {
            b = mid;
        }
    }
    if blocked_at_a {
        b
    } else {
        a
    }
}

fn run_cause(cfg: &TrammelConfig, lo: f64, hi: f64) -> Cause {
    // Sample the interior of the run; the arc endpoints are free by construction.
    let samples = 64;
    let (mut hit, mut over) = (false, false);
    for k in 1..samples {
        let t = lo + (hi - lo) * k as f64 / samples as f64;
        hit |= collides(cfg, t);
        over |= overruns(cfg, t);
    }
    match (hit, over) {
        (true, true) => Cause::Both,
        (false, true) => Cause::Overrun,
        _ => Cause::Collision,
    }
}

/// Angles at which the pen can draw.
pub fn drawable_trace_domain(cfg: &TrammelConfig, tol: f64) -> AngleSet {
    forbidden_arcs(cfg, tol).drawable()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn cfg(l: f64, shuttle: ShuttleFootprint, channel: f64) -> TrammelConfig {
        TrammelConfig::new(l, l + 100.0, shuttle, channel).unwrap()
    }

    #[test]
    fn rect_examples() {
        let c = cfg(2.0, ShuttleFootprint::default(), 1000.0);
        let (rc, rd) = shuttle_rects(&c, 0.0);
        assert_eq!(rc.min, Point2 { x: -14.0, y: -4.0 });
        assert_eq!(rc.max, Point2 { x: 18.0, y: 4.0 });
        assert_eq!(rd.min, Point2 { x: -4.0, y: -16.0 });
        assert_eq!(rd.max, Point2 { x: 4.0, y: 16.0 });

        let (rc, _) = shuttle_rects(&c, FRAC_PI_2);
        assert!(rc.center().x.abs() < 1e-15 && rc.center().y == 0.0);

        let z = cfg(
            2.0,
            ShuttleFootprint {
                length: 0.0,
                width: 0.0,
            },
            1000.0,
        );
        let (rc, rd) = shuttle_rects(&z, 0.3);
        assert_eq!(rc.min, rc.max);
        assert_eq!(rd.min, rd.max);
    }

    #[test]
    fn touching_counts_as_contact() {
        let a = Rect::centered(Point2 { x: 0.0, y: 0.0 }, 1.0, 1.0);
        let b = Rect::centered(Point2 { x: 2.0, y: 0.0 }, 1.0, 1.0);
        let c = Rect::centered(
            Point2 {
                x: 2.0 + 1e-12,
                y: 0.0,
            },
            1.0,
            1.0,
        );
        assert!(a.touches(&b));
        assert!(!a.touches(&c));
    }

    #[test]
    fn collision_examples() {
        let sh = ShuttleFootprint::default();
        assert_eq!(sh.contact_distance(), 20.0);
        assert!(collides(&cfg(24.0, sh, 1000.0), FRAC_PI_4));
        assert!(!collides(&cfg(24.0, sh, 1000.0), 0.0));
        let wide = cfg(56.0, sh, 1000.0);
        assert!((0..10_000).all(|k| !collides(&wide, TAU * k as f64 / 10_000.0)));
    }

    #[test]
    fn ample_geometry_is_fully_drawable() {
        let r = forbidden_arcs(&cfg(56.0, ShuttleFootprint::default(), 1000.0), 1e-9);
        assert!(r.forbidden.is_empty());
        assert_eq!(r.drawable_fraction, 1.0);
        assert!(
            drawable_trace_domain(&cfg(56.0, ShuttleFootprint::default(), 1000.0), 1e-9).is_full()
        );
    }

    #[test]
    fn point_shuttles_never_collide() {
        for l in [0.5, 5.0, 24.0, 300.0] {
            let r = forbidden_arcs(
                &cfg(
                    l,
                    ShuttleFootprint {
                        length: 0.0,
                        width: 0.0,
                    },
                    1e6,
                ),
                1e-9,
            );
            assert!(r.forbidden.is_empty());
        }
    }

    #[test]
    fn short_channel_forbids_everything() {
        let r = forbidden_arcs(&cfg(24.0, ShuttleFootprint::default(), 10.0), 1e-9);
        assert!(r.forbidden.is_full());
        assert_eq!(r.drawable_fraction, 0.0);
        assert!(
            drawable_trace_domain(&cfg(24.0, ShuttleFootprint::default(), 10.0), 1e-9).is_empty()
        );
    }

    #[test]
    fn overrun_arcs_are_tagged() {
        // limit = 60 - 16 = 44 < ℓ = 50: overrun around the axes, no collision
        let c = cfg(50.0, ShuttleFootprint::default(), 60.0);
        let r = forbidden_arcs(&c, 1e-9);
        assert_eq!(r.boundaries.len(), 4);
        assert!(r.boundaries.iter().all(|a| a.cause == Cause::Overrun));
        // one of them wraps through zero
        assert!(r.boundaries.iter().any(|a| a.hi > TAU));
        let half = (44.0f64 / 50.0).acos();
        for a in &r.boundaries {
            assert!((a.width() - 2.0 * half).abs() < 1e-8);
        }
    }

    #[test]
    fn collision_arcs_for_short_rod() {
        let r = forbidden_arcs(&cfg(24.0, ShuttleFootprint::default(), 1000.0), 1e-10);
        assert_eq!(r.boundaries.len(), 4);
        let lo = (20.0f64 / 24.0).acos();
        let hi = (20.0f64 / 24.0).asin();
        let a = r.boundaries[0];
        assert_eq!(a.cause, Cause::Collision);
        assert!((a.lo - lo).abs() < 1e-9 && (a.hi - hi).abs() < 1e-9);
        let centers: Vec<f64> = r.boundaries.iter().map(|a| 0.5 * (a.lo + a.hi)).collect();
        for (c, k) in centers.iter().zip([1.0, 3.0, 5.0, 7.0]) {
            assert!((c - k * FRAC_PI_4).abs() < 1e-9);
        }
    }

    #[test]
    fn report_fraction_matches_boundaries() {
        for l in [10.0, 24.0, 27.0, 50.0] {
            let r = forbidden_arcs(&cfg(l, ShuttleFootprint::default(), 60.0), 1e-9);
            let from_bounds = 1.0 - r.boundaries.iter().map(ForbiddenArc::width).sum::<f64>() / TAU;
            assert!((from_bounds - r.drawable_fraction).abs() <= 1e-12);
        }
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let c = cfg(24.0, ShuttleFootprint::default(), 40.0);
        assert_eq!(
            forbidden_arcs_with(&c, 1e-9, Exec::Sequential),
            forbidden_arcs_with(&c, 1e-9, Exec::Parallel)
        );
    }
}
