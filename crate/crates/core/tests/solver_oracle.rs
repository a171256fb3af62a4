use std::f64::consts::TAU;

use ellipsograph::clearance::ShuttleFootprint;
use ellipsograph::solver::{self, ConstraintState, SolverConfig};
use ellipsograph::TrammelConfig;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Central differences of the residual map, one column per unknown.
fn fd_jacobian(l: f64, theta: f64, st: ConstraintState, h: f64) -> [[f64; 2]; 2] {
    let col = |dx: f64, dy: f64| {
        let p = solver::residuals(l, theta, ConstraintState::new(st.x_c + dx, st.y_d + dy));
        let m = solver::residuals(l, theta, ConstraintState::new(st.x_c - dx, st.y_d - dy));
        ((p.0 - m.0) / (2.0 * h), (p.1 - m.1) / (2.0 * h))
    };
    let (a, c) = col(h, 0.0);
    let (b, d) = col(0.0, h);
    [[a, b], [c, d]]
}

fn max_abs(j: &[[f64; 2]; 2]) -> f64 {
    j.iter().flatten().fold(0.0, |m, v| m.max(v.abs()))
}

#[test]
fn analytic_jacobian_matches_finite_differences() {
    let cfg = SolverConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let l = rng.random_range(0.5..200.0);
        let theta = rng.random_range(0.0..TAU);
        let st = ConstraintState::new(
            rng.random_range(-2.0 * l..2.0 * l),
            rng.random_range(-2.0 * l..2.0 * l),
        );
        let exact = solver::jacobian(l, theta, st);
        let approx = fd_jacobian(l, theta, st, cfg.fd_step);
        let diff = [
            [exact[0][0] - approx[0][0], exact[0][1] - approx[0][1]],
            [exact[1][0] - approx[1][0], exact[1][1] - approx[1][1]],
        ];
        worst = worst.max(max_abs(&diff) / max_abs(&exact).max(1.0));
    }
    assert!(worst < 1e-6, "worst relative error {worst:e}");
}

#[test]
fn continuation_matches_closed_form() {
    let cfg = SolverConfig::default();
    for (l, steps) in [(2.0, 360), (56.0, 720), (40.0, 720), (0.01, 90)] {
        let sols = solver::sweep(l, 0.0, TAU, steps, &cfg).unwrap();
        assert_eq!(sols.len(), steps);
        let trammel = TrammelConfig::new(l, l + 1.0, ShuttleFootprint::default(), 1e3).unwrap();
        for s in &sols {
            let st = trammel.rod_state(s.theta);
            assert!(
                (s.state.x_c - st.pivot_x.x).abs() <= 1e-9,
                "ℓ={l} θ={}",
                s.theta
            );
            assert!(
                (s.state.y_d - st.pivot_y.y).abs() <= 1e-9,
                "ℓ={l} θ={}",
                s.theta
            );
            assert!(s.state.x_c * st.pivot_x.x >= 0.0 && s.state.y_d * st.pivot_y.y >= 0.0);
            let det = solver::determinant(&solver::jacobian(l, s.theta, s.state));
            assert!((det - 2.0 * l).abs() <= 1e-9 * l);
        }
    }
}

#[test]
fn continuation_iterations_stay_small() {
    let sols = solver::sweep(56.0, 0.0, TAU, 720, &SolverConfig::default()).unwrap();
    let worst = sols.iter().map(|s| s.iterations).max().unwrap();
    assert!(worst <= 4, "{worst} iterations");
}

#[test]
fn newton_converges_quadratically() {
    let (l, theta) = (56.0, 1.1);
    let exact = ConstraintState::closed_form(l, theta);
    let guess = ConstraintState::new(exact.x_c + 0.6 * l / 4.0, exact.y_d - 0.8 * l / 4.0);

    // residual norm after exactly k Newton steps, read from the failure report
    let residual_after = |k: usize| {
        let cfg = SolverConfig::new(1e-300, k, 1e-6).unwrap();
        match solver::solve_at(l, theta, guess, &cfg) {
            Err(solver::SolverError::NonConvergence { g1, g2, .. }) => (g1 / l).abs().max(g2.abs()),
            Ok(s) => (s.residuals.0 / l).abs().max(s.residuals.1.abs()),
            Err(e) => panic!("{e}"),
        }
    };
    let r: Vec<f64> = (1..=5).map(residual_after).collect();
    for k in 0..r.len() - 1 {
        if r[k] > 1e-6 {
            assert!(r[k + 1] / (r[k] * r[k]) < 10.0, "ratio at step {k}: {r:?}");
        }
    }

    let sol = solver::solve_at(l, theta, guess, &SolverConfig::default()).unwrap();
    assert!(sol.iterations <= 6);
    assert!(sol.state.distance(&exact) <= 1e-9);
}
