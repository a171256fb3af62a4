//! Numeric counterpart to the closed-form kinematics.
//!
//! The pivot coordinates `(x_C, y_D)` are unknowns of a 2×2 system:
//!
//! ```text
//! g1 = x_C² + y_D² - ℓ²          (rigid rod)
//! g2 = y_D cos θ - x_C sin θ     (rod direction follows the drive angle)
//! ```
//!
//! solved with plain Newton–Raphson. The Jacobian determinant equals
//! `2 (x_C cos θ + y_D sin θ)`, which is `2ℓ` at every principal-branch
//! solution, so continuation in `θ` never meets a singular step.

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error(
        "no convergence at θ = {theta} after {iterations} iterations (g1 = {g1:e}, g2 = {g2:e})"
    )]
    NonConvergence {
        theta: f64,
        iterations: usize,
        g1: f64,
        g2: f64,
    },
    #[error("singular Jacobian at θ = {theta} (det = {det:e})")]
    SingularJacobian { theta: f64, det: f64 },
    #[error("invalid solver input: {0}")]
    InvalidInput(String),
}

/// Channel coordinates of the two pivots.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConstraintState {
    pub x_c: f64,
    pub y_d: f64,
}

impl ConstraintState {
    pub fn new(x_c: f64, y_d: f64) -> Self {
        Self { x_c, y_d }
    }

    /// Principal-branch solution `(ℓ cos θ, ℓ sin θ)`.
    pub fn closed_form(pivot_separation: f64, theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self::new(pivot_separation * c, pivot_separation * s)
    }

    pub fn distance(&self, other: &Self) -> f64 {
        (self.x_c - other.x_c).hypot(self.y_d - other.y_d)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub tol: f64,
    pub max_iter: usize,
    /// Step for finite-difference checks of the Jacobian.
    pub fd_step: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            max_iter: 25,
            fd_step: 1e-6,
        }
    }
}

impl SolverConfig {
    pub fn new(tol: f64, max_iter: usize, fd_step: f64) -> Result<Self, SolverError> {
        if !(tol.is_finite() && tol > 0.0) {
            return Err(SolverError::InvalidInput(format!(
                "tol must be positive, got {tol}"
            )));
        }
        if max_iter == 0 {
            return Err(SolverError::InvalidInput(
                "max_iter must be at least 1".into(),
            ));
        }
        if !(fd_step.is_finite() && fd_step > 0.0) {
            return Err(SolverError::InvalidInput(format!(
                "fd_step must be positive, got {fd_step}"
            )));
        }
        Ok(Self {
            tol,
            max_iter,
            fd_step,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Solution {
    pub theta: f64,
    pub state: ConstraintState,
    /// Newton steps taken; zero if the guess already satisfied the tolerance.
    pub iterations: usize,
    pub residuals: (f64, f64),
}

pub fn residuals(pivot_separation: f64, theta: f64, st: ConstraintState) -> (f64, f64) {
    let (sin, cos) = theta.sin_cos();
    let l = pivot_separation;
    (
        st.x_c * st.x_c + st.y_d * st.y_d - l * l,
        st.y_d * cos - st.x_c * sin,
    )
}

/// Analytic Jacobian of [`residuals`] with respect to `(x_C, y_D)`.
pub fn jacobian(_pivot_separation: f64, theta: f64, st: ConstraintState) -> [[f64; 2]; 2] {
    let (sin, cos) = theta.sin_cos();
    [[2.0 * st.x_c, 2.0 * st.y_d], [-sin, cos]]
}

pub fn determinant(j: &[[f64; 2]; 2]) -> f64 {
    j[0][0] * j[1][1] - j[0][1] * j[1][0]
}

fn converged(l: f64, g: (f64, f64), tol: f64) -> bool {
    g.0.abs() <= tol * l && g.1.abs() <= tol
}

/// Newton–Raphson from `guess`. The branch is chosen by the guess alone:
/// a guess near `-(ℓ cos θ, ℓ sin θ)` converges to the antipodal solution.
pub fn solve_at(
    pivot_separation: f64,
    theta: f64,
    guess: ConstraintState,
    cfg: &SolverConfig,
) -> Result<Solution, SolverError> {
    let l = pivot_separation;
    if !(l.is_finite() && l > 0.0) {
        return Err(SolverError::InvalidInput(format!(
            "pivot separation must be positive, got {l}"
        )));
    }
    let mut st = guess;
    let mut g = residuals(l, theta, st);
    for iterations in 0..=cfg.max_iter {
        if converged(l, g, cfg.tol) {
            return Ok(Solution {
                theta,
                state: st,
                iterations,
                residuals: g,
            });
        }
        if iterations == cfg.max_iter {
            break;
        }
        let j = jacobian(l, theta, st);
        let det = determinant(&j);
        if det.is_nan() || det.abs() < 1e-14 * l {
            return Err(SolverError::SingularJacobian { theta, det });
        }
        // Cramer's rule for J·δ = -g
        let dx = (-g.0 * j[1][1] + g.1 * j[0][1]) / det;
        let dy = (-g.1 * j[0][0] + g.0 * j[1][0]) / det;
        st = ConstraintState::new(st.x_c + dx, st.y_d + dy);
        g = residuals(l, theta, st);
    }
    Err(SolverError::NonConvergence {
        theta,
        iterations: cfg.max_iter,
        g1: g.0,
        g2: g.1,
    })
}

/// Continuation over `n_steps` angles `θ_start + k·(θ_end - θ_start)/n_steps`,
/// `k = 0..n_steps`; each solution seeds the next solve. The end angle itself
/// is not solved, so a full turn does not repeat its first state.
pub fn sweep(
    pivot_separation: f64,
    theta_start: f64,
    theta_end: f64,
    n_steps: usize,
    cfg: &SolverConfig,
) -> Result<Vec<Solution>, SolverError> {
    if n_steps == 0 {
        return Err(SolverError::InvalidInput(
            "n_steps must be at least 1".into(),
        ));
    }
    let step = (theta_end - theta_start) / n_steps as f64;
    let mut guess = ConstraintState::closed_form(pivot_separation, theta_start);
    let mut out = Vec::with_capacity(n_steps);
    for k in 0..n_steps {
        let theta = theta_start + step * k as f64;
        let sol = solve_at(pivot_separation, theta, guess, cfg)?;
        guess = sol.state;
        out.push(sol);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, TAU};

    #[test]
    fn residual_examples() {
        assert_eq!(
            residuals(2.0, 0.0, ConstraintState::new(2.0, 0.0)),
            (0.0, 0.0)
        );
        assert_eq!(
            residuals(2.0, 0.0, ConstraintState::new(0.0, 0.0)),
            (-4.0, 0.0)
        );
        let (g1, g2) = residuals(2.0, FRAC_PI_2, ConstraintState::new(0.0, 2.0));
        assert_eq!(g1, 0.0);
        assert!(g2.abs() < 1e-15);
    }

    #[test]
    fn jacobian_example_and_determinant_identity() {
        let j = jacobian(2.0, 0.0, ConstraintState::new(2.0, 0.0));
        assert_eq!(j, [[4.0, 0.0], [0.0, 1.0]]);
        assert_eq!(determinant(&j), 4.0);
        for k in 0..64 {
            let theta = TAU * k as f64 / 64.0;
            for l in [0.5, 2.0, 56.0] {
                let j = jacobian(l, theta, ConstraintState::closed_form(l, theta));
                assert!((determinant(&j) - 2.0 * l).abs() <= 1e-9 * l);
            }
        }
    }

    #[test]
    fn converges_from_perturbed_guess() {
        let cfg = SolverConfig::default();
        let exact = ConstraintState::closed_form(2.0, 0.7);
        let guess = ConstraintState::new(exact.x_c + 0.1, exact.y_d - 0.1);
        let sol = solve_at(2.0, 0.7, guess, &cfg).unwrap();
        assert!(sol.state.distance(&exact) < 1e-9);
        assert!(sol.iterations <= 6);
    }

    #[test]
    fn branch_follows_guess() {
        let cfg = SolverConfig::default();
        let sol = solve_at(2.0, 0.0, ConstraintState::new(1.8, 0.05), &cfg).unwrap();
        assert!(sol.state.distance(&ConstraintState::new(2.0, 0.0)) < 1e-9);
        let sol = solve_at(2.0, 0.0, ConstraintState::new(-1.8, 0.05), &cfg).unwrap();
        assert!(sol.state.distance(&ConstraintState::new(-2.0, 0.0)) < 1e-9);
    }

    #[test]
    fn origin_guess_is_singular() {
        let err = solve_at(
            2.0,
            0.3,
            ConstraintState::new(0.0, 0.0),
            &SolverConfig::default(),
        );
        assert!(matches!(err, Err(SolverError::SingularJacobian { .. })));
    }

    #[test]
    fn impossible_tolerance_reports_nonconvergence() {
        // Newton can land on exactly zero residuals, which meets any tolerance.
        let cfg = SolverConfig::new(1e-30, 25, 1e-6).unwrap();
        let mut failures = 0;
        for k in 0..20 {
            let theta = 0.1 + 0.3 * k as f64;
            let guess = ConstraintState::closed_form(56.0, theta + 0.05);
            match solve_at(56.0, theta, guess, &cfg) {
                Ok(sol) => assert_eq!(sol.residuals, (0.0, 0.0)),
                Err(SolverError::NonConvergence {
                    iterations,
                    theta: t,
                    ..
                }) => {
                    assert_eq!(iterations, 25);
                    assert_eq!(t, theta);
                    failures += 1;
                }
                Err(other) => panic!("unexpected {other:?}"),
            }
        }
        assert!(failures > 0);
    }

    #[test]
    fn config_validation() {
        assert!(SolverConfig::new(0.0, 25, 1e-6).is_err());
        assert!(SolverConfig::new(1e-9, 0, 1e-6).is_err());
        assert!(SolverConfig::new(1e-9, 1, -1.0).is_err());
        assert!(solve_at(
            -1.0,
            0.0,
            ConstraintState::new(1.0, 0.0),
            &SolverConfig::default()
        )
        .is_err());
    }

    #[test]
    fn sweep_single_step_and_full_turn() {
        let cfg = SolverConfig::default();
        let one = sweep(2.0, 0.4, 1.0, 1, &cfg).unwrap();
        assert_eq!(one.len(), 1);
        assert_eq!(one[0].theta, 0.4);

        let all = sweep(2.0, 0.0, TAU, 360, &cfg).unwrap();
        assert_eq!(all.len(), 360);
        for sol in &all {
            let exact = ConstraintState::closed_form(2.0, sol.theta);
            assert!(sol.state.distance(&exact) < 1e-9);
        }
        assert!(sweep(2.0, 0.0, 1.0, 0, &cfg).is_err());
    }

    #[test]
    fn sweep_attaches_failing_angle() {
        let cfg = SolverConfig::new(1e-30, 3, 1e-6).unwrap();
        match sweep(2.0, 0.25, 1.0, 4, &cfg) {
            Err(SolverError::NonConvergence { theta, .. }) => assert_eq!(theta, 0.25),
            other => panic!("unexpected {other:?}"),
        }
    }
}
