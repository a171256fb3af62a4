//! Closed-form kinematics of the trammel.
//!
//! The x-channel pivot `C` slides along the x-axis and the y-channel pivot
//! `D` along the y-axis, both a fixed distance `ℓ` apart on the rod. The pen
//! sits on the rod at distance `s` from `D`, measured toward `C`. With rod
//! angle `θ`:
//!
//! ```text
//! C = (ℓ cos θ, 0)    D = (0, ℓ sin θ)    P = (s cos θ, (ℓ - s) sin θ)
//! ```
//!
//! so the pen traces the ellipse with semi-axes `(s, |ℓ - s|)`. `s < ℓ` puts
//! the pen between the pivots, `s > ℓ` beyond `C`.

use serde::Serialize;
use thiserror::Error;

use crate::clearance::ShuttleFootprint;
use crate::geometry::{normalize_angle, EllipseSpec, Point2};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("pivot separation must be positive and finite, got {0} mm")]
    PivotSeparation(f64),
    #[error("pen offset must be positive and finite, got {0} mm")]
    PenOffset(f64),
    #[error(
        "pen offset equals pivot separation ({0} mm): the pen sits on pivot C and traces a segment"
    )]
    PenOnPivot(f64),
    #[error("channel half-length must be non-negative and finite, got {0} mm")]
    ChannelHalfLength(f64),
    #[error("shuttle {field} must be non-negative and finite, got {value} mm")]
    Shuttle { field: &'static str, value: f64 },
    #[error("semi-axes must be positive and finite, got a = {a}, b = {b}")]
    SemiAxes { a: f64, b: f64 },
    #[error(
        "pen-outside design needs unequal semi-axes (a = b = {0} would give zero pivot separation)"
    )]
    EqualAxesOutside(f64),
}

/// Which classic trammel layout [`design_for_ellipse`] should produce.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// Pen beyond pivot `C`: `ℓ = |a - b|`, `s = max(a, b)`.
    PenOutside,
    /// Pen between the pivots: `ℓ = a + b`, `s = a`.
    PenBetween,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrammelConfig {
    pivot_separation: f64,
    pen_offset: f64,
    shuttle: ShuttleFootprint,
    channel_half_length: f64,
}

impl TrammelConfig {
    pub fn new(
        pivot_separation: f64,
        pen_offset: f64,
        shuttle: ShuttleFootprint,
        channel_half_length: f64,
    ) -> Result<Self, ConfigError> {
        if !(pivot_separation.is_finite() && pivot_separation > 0.0) {
            return Err(ConfigError::PivotSeparation(pivot_separation));
        }
        if !(pen_offset.is_finite() && pen_offset > 0.0) {
            return Err(ConfigError::PenOffset(pen_offset));
        }
        if pen_offset == pivot_separation {
            return Err(ConfigError::PenOnPivot(pen_offset));
        }
        if !(channel_half_length.is_finite() && channel_half_length >= 0.0) {
            return Err(ConfigError::ChannelHalfLength(channel_half_length));
        }
        let shuttle = ShuttleFootprint::new(shuttle.length, shuttle.width)?;
        Ok(Self {
            pivot_separation,
            pen_offset,
            shuttle,
            channel_half_length,
        })
    }

    pub fn pivot_separation(&self) -> f64 {
        self.pivot_separation
    }

    pub fn pen_offset(&self) -> f64 {
        self.pen_offset
    }

    pub fn shuttle(&self) -> ShuttleFootprint {
        self.shuttle
    }

    pub fn channel_half_length(&self) -> f64 {
        self.channel_half_length
    }

    pub fn with_shuttle(self, shuttle: ShuttleFootprint) -> Result<Self, ConfigError> {
        Self::new(
            self.pivot_separation,
            self.pen_offset,
            shuttle,
            self.channel_half_length,
        )
    }

    pub fn with_channel_half_length(self, half_length: f64) -> Result<Self, ConfigError> {
        Self::new(
            self.pivot_separation,
            self.pen_offset,
            self.shuttle,
            half_length,
        )
    }

    pub fn variant(&self) -> Variant {
        if self.pen_offset > self.pivot_separation {
            Variant::PenOutside
        } else {
            Variant::PenBetween
        }
    }

    /// `(s, |ℓ - s|)`: semi-axes along the x- and y-channels.
    pub fn semi_axes(&self) -> (f64, f64) {
        (
            self.pen_offset,
            (self.pivot_separation - self.pen_offset).abs(),
        )
    }

    pub fn ellipse(&self) -> EllipseSpec {
        let (a, b) = self.semi_axes();
        EllipseSpec::new(a, b).expect("validated config has positive semi-axes")
    }

    /// Mechanism state at rod angle `theta`. The angle is normalized to
    /// `[0, 2π)` first, so the result is periodic.
    pub fn rod_state(&self, theta: f64) -> RodState {
        let theta = normalize_angle(theta);
        let (sin, cos) = theta.sin_cos();
        let l = self.pivot_separation;
        let s = self.pen_offset;
        RodState {
            theta,
            pivot_x: Point2 { x: l * cos, y: 0.0 },
            pivot_y: Point2 { x: 0.0, y: l * sin },
            pen: Point2 {
                x: s * cos,
                y: (l - s) * sin,
            },
        }
    }

    pub fn pen_at(&self, theta: f64) -> Point2 {
        self.rod_state(theta).pen
    }

    /// Channel half-extent needed for a full turn: each pivot travels over
    /// `[-ℓ, ℓ]` and its shuttle sticks out by half its length.
    pub fn required_channel_half_length(&self) -> f64 {
        self.pivot_separation + self.shuttle.length / 2.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RodState {
    pub theta: f64,
    /// Pivot `C` on the x-channel.
    pub pivot_x: Point2,
    /// Pivot `D` on the y-channel.
    pub pivot_y: Point2,
    pub pen: Point2,
}

/// Inverse of [`TrammelConfig::semi_axes`].
pub fn design_for_ellipse(
    a: f64,
    b: f64,
    variant: Variant,
    shuttle: ShuttleFootprint,
    channel_half_length: f64,
) -> Result<TrammelConfig, ConfigError> {
    if !(a.is_finite() && b.is_finite() && a > 0.0 && b > 0.0) {
        return Err(ConfigError::SemiAxes { a, b });
    }
    let (l, s) = match variant {
        Variant::PenOutside => {
            if a == b {
                return Err(ConfigError::EqualAxesOutside(a));
            }
            ((a - b).abs(), a.max(b))
        }
        Variant::PenBetween => (a + b, a),
    };
    TrammelConfig::new(l, s, shuttle, channel_half_length)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, TAU};

    fn cfg(l: f64, s: f64) -> TrammelConfig {
        TrammelConfig::new(l, s, ShuttleFootprint::default(), 1000.0).unwrap()
    }

    #[test]
    fn semi_axes_examples() {
        assert_eq!(cfg(2.0, 5.0).semi_axes(), (5.0, 3.0));
        assert_eq!(cfg(8.0, 5.0).semi_axes(), (5.0, 3.0));
        assert_eq!(cfg(4.0, 2.0).semi_axes(), (2.0, 2.0));
        assert_eq!(cfg(2.0, 5.0).variant(), Variant::PenOutside);
        assert_eq!(cfg(8.0, 5.0).variant(), Variant::PenBetween);
    }

    #[test]
    fn degenerate_configs_are_rejected() {
        let sh = ShuttleFootprint::default();
        assert_eq!(
            TrammelConfig::new(3.0, 3.0, sh, 10.0),
            Err(ConfigError::PenOnPivot(3.0))
        );
        assert!(TrammelConfig::new(0.0, 3.0, sh, 10.0).is_err());
        assert!(TrammelConfig::new(2.0, -1.0, sh, 10.0).is_err());
        assert!(TrammelConfig::new(2.0, 1.0, sh, -1.0).is_err());
        assert!(TrammelConfig::new(
            2.0,
            1.0,
            ShuttleFootprint {
                length: -1.0,
                width: 0.0
            },
            1.0
        )
        .is_err());
    }

    #[test]
    fn rod_state_examples() {
        let c = cfg(2.0, 5.0);
        let st = c.rod_state(0.0);
        assert_eq!(st.pivot_x, Point2 { x: 2.0, y: 0.0 });
        assert_eq!(st.pivot_y, Point2 { x: 0.0, y: 0.0 });
        assert_eq!(st.pen, Point2 { x: 5.0, y: 0.0 });

        let st = c.rod_state(FRAC_PI_2);
        assert!(st.pivot_x.x.abs() < 1e-15);
        assert!((st.pivot_y.y - 2.0).abs() < 1e-15);
        assert!(st.pen.x.abs() < 1e-15 && (st.pen.y + 3.0).abs() < 1e-15);

        let st = c.rod_state(FRAC_PI_4);
        assert!((st.pen.x - 3.535534).abs() < 1e-6);
        assert!((st.pen.y + 2.121320).abs() < 1e-6);
    }

    #[test]
    fn design_examples() {
        let sh = ShuttleFootprint::default();
        let c = design_for_ellipse(5.0, 3.0, Variant::PenOutside, sh, 100.0).unwrap();
        assert_eq!((c.pivot_separation(), c.pen_offset()), (2.0, 5.0));
        let c = design_for_ellipse(5.0, 3.0, Variant::PenBetween, sh, 100.0).unwrap();
        assert_eq!((c.pivot_separation(), c.pen_offset()), (8.0, 5.0));
        let c = design_for_ellipse(3.0, 3.0, Variant::PenBetween, sh, 100.0).unwrap();
        assert_eq!((c.pivot_separation(), c.pen_offset()), (6.0, 3.0));
        assert_eq!(
            design_for_ellipse(3.0, 3.0, Variant::PenOutside, sh, 100.0),
            Err(ConfigError::EqualAxesOutside(3.0))
        );
        assert!(design_for_ellipse(0.0, 3.0, Variant::PenBetween, sh, 100.0).is_err());
        assert!(design_for_ellipse(3.0, -1.0, Variant::PenOutside, sh, 100.0).is_err());
    }

    #[test]
    fn required_channel_examples() {
        let with = |l: f64, len: f64| {
            TrammelConfig::new(
                l,
                l + 1.0,
                ShuttleFootprint {
                    length: len,
                    width: 8.0,
                },
                0.0,
            )
            .unwrap()
            .required_channel_half_length()
        };
        assert_eq!(with(56.0, 32.0), 72.0);
        assert!((with(0.001, 32.0) - 16.001).abs() < 1e-12);
        assert_eq!(with(24.0, 0.0), 24.0);
    }

    #[test]
    fn rod_state_is_periodic() {
        let c = cfg(2.0, 5.0);
        for k in 0..1000 {
            let t = TAU * k as f64 / 1000.0;
            let a = c.rod_state(t);
            assert_eq!(a, c.rod_state(normalize_angle(t)));
            let b = c.rod_state(t + TAU);
            if normalize_angle(t + TAU) == a.theta {
                assert_eq!(a, b);
            } else {
                assert!(a.pen.distance(b.pen) < 1e-12);
            }
        }
    }
}
