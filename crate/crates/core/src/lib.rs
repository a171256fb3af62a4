//! Simulation and verification of the trammel of Archimedes (ellipsograph).
//!
//! Two shuttles slide in perpendicular channels and carry the pivots of a
//! rigid rod; a pen fixed on the rod draws an ellipse. This crate provides
//!
//! * [`geometry`]: points, ellipses, foci and arc sets on the rod-angle circle,
//! * [`trammel`]: closed-form kinematics and the inverse design problem,
//! * [`solver`]: a Newton–Raphson constraint solver used as an independent check,
//! * [`clearance`]: shuttle collision and channel overrun analysis,
//! * [`export`]: trace sampling, page fitting, SVG and CSV output,
//! * [`bom`]: the parts list with exact cent arithmetic.
//!
//! Batch loops run on rayon when the `parallel` feature (default) is on; see
//! [`exec::Exec`].

pub mod bom;
pub mod clearance;
pub mod exec;
pub mod export;
pub mod geometry;
pub mod solver;
pub mod trammel;

pub use clearance::{ClearanceReport, ShuttleFootprint};
pub use exec::Exec;
pub use geometry::{AngleSet, EllipseSpec, Point2, Tolerances, STUD_MM};
pub use trammel::{RodState, TrammelConfig, Variant};
