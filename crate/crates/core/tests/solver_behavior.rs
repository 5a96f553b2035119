//! Solver contract tests on the driving problems: residual smallness,
//! history bookkeeping, strategy agreement, initial-guess independence,
//! damping, and the monotone Newton tail.

use std::sync::Arc;

use signorini_cr::analysis::norm_broken_h1;
use signorini_cr::cr_space::cr_interpolate;
use signorini_cr::forms::assemble_load;
use signorini_cr::mesh::{build_unit_square_mesh, classify_boundary, standard_tagger, DiagonalPattern};
use signorini_cr::problems::{known_problem, oscillatory_problem};
use signorini_cr::solver::solve_nonlinear;
use signorini_cr::{CRSpace, DiscreteField, NitscheParams, SolverConfig, SolverStrategy};

fn classified_space(n: usize) -> Arc<CRSpace> {
    let mesh = build_unit_square_mesh(n, DiagonalPattern::UnionJack).unwrap();
    let mesh = classify_boundary(mesh, &standard_tagger()).unwrap();
    CRSpace::new(Arc::new(mesh))
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

fn relative_gap(a: &DiscreteField, b: &DiscreteField) -> f64 {
    norm_broken_h1(&a.sub(b)) / norm_broken_h1(b)
}

#[test]
fn converged_runs_meet_the_residual_and_history_contract() {
    let space = classified_space(16);
    let problem = known_problem();
    let load = assemble_load(&space, |x, y| (problem.f)(x, y));
    let scale = 1.0 + inf_norm(&load);
    for (theta1, theta2) in [(1.0, 0.0), (1.0, 1.0)] {
        let params = NitscheParams::new(10.0, theta1, theta2).unwrap();
        for strategy in [SolverStrategy::FixedPoint, SolverStrategy::SemismoothNewton] {
            let config = SolverConfig {
                strategy,
                ..SolverConfig::default()
            };
            let (_, report) = solve_nonlinear(&space, &params, &problem, &config).unwrap();
            assert!(report.converged, "{strategy:?} (θ = ({theta1}, {theta2}))");
            assert_eq!(report.iterations, report.increment_history.len());
            assert!(*report.increment_history.last().unwrap() < config.rel_increment_tol);
            assert!(report.iterations_to_increment_tol.unwrap() <= config.max_iter);
            assert!(
                report.final_residual_norm <= 1e-8 * scale,
                "{strategy:?} residual {}",
                report.final_residual_norm
            );
            assert!(!report.fell_back_to_fixed_point);
        }
    }
}

#[test]
fn newton_increment_tail_is_non_increasing() {
    let params = NitscheParams::penalty_free(10.0).unwrap();
    let problem = known_problem();
    for n in [8, 16, 32] {
        let space = classified_space(n);
        let (_, report) =
            solve_nonlinear(&space, &params, &problem, &SolverConfig::default()).unwrap();
        assert!(report.converged);
        let h = &report.increment_history;
        assert!(h.len() >= 3, "n = {n}: expected at least three iterations");
        let tail = &h[h.len() - 3..];
        assert!(
            tail[0] >= tail[1] && tail[1] >= tail[2],
            "n = {n}: tail {tail:?} increases"
        );
    }
}

#[test]
fn strategies_agree_well_below_the_increment_tolerance() {
    let problem = known_problem();
    for (theta1, theta2) in [(1.0, 0.0), (1.0, 1.0)] {
        let params = NitscheParams::new(10.0, theta1, theta2).unwrap();
        let space = classified_space(16);
        let mut fields = Vec::new();
        for strategy in [SolverStrategy::FixedPoint, SolverStrategy::SemismoothNewton] {
            let config = SolverConfig {
                strategy,
                ..SolverConfig::default()
            };
            let (u, report) = solve_nonlinear(&space, &params, &problem, &config).unwrap();
            assert!(report.converged);
            fields.push(u);
        }
        let rel = relative_gap(&fields[0], &fields[1]);
        assert!(
            rel <= 1e-7,
            "θ = ({theta1}, {theta2}): strategies differ by {rel}"
        );
    }
}

#[test]
fn three_random_initial_fields_reach_the_same_solution() {
    let space = classified_space(8);
    let params = NitscheParams::penalty_free(10.0).unwrap();
    let problem = known_problem();
    let n = space.n_dofs();
    let mut solutions = Vec::new();
    for seed in [11u64, 29, 47] {
        let mut state = seed.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(1);
        let mut rand = move || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (state >> 12) as f64 / (1u64 << 52) as f64 - 0.5
        };
        let guess: Vec<f64> = (0..n).map(|_| rand()).collect();
        let config = SolverConfig {
            initial_guess: Some(guess),
            ..SolverConfig::default()
        };
        let (u, report) = solve_nonlinear(&space, &params, &problem, &config).unwrap();
        assert!(report.converged, "seed {seed} failed to converge");
        solutions.push(u);
    }
    for i in 0..solutions.len() {
        for j in (i + 1)..solutions.len() {
            let rel = relative_gap(&solutions[i], &solutions[j]);
            assert!(rel <= 1e-7, "guesses {i} and {j} differ by {rel}");
        }
    }
}

#[test]
fn damped_iteration_reaches_the_undamped_solution() {
    let space = classified_space(8);
    let params = NitscheParams::penalty_free(10.0).unwrap();
    let problem = known_problem();
    let full = solve_nonlinear(&space, &params, &problem, &SolverConfig::default()).unwrap();
    let damped_config = SolverConfig {
        damping: 0.5,
        ..SolverConfig::default()
    };
    let damped = solve_nonlinear(&space, &params, &problem, &damped_config).unwrap();
    assert!(full.1.converged && damped.1.converged);
    assert!(
        damped.1.iterations_to_increment_tol.unwrap()
            >= full.1.iterations_to_increment_tol.unwrap(),
        "half steps should not converge faster"
    );
    let rel = relative_gap(&damped.0, &full.0);
    assert!(rel <= 1e-7, "damping changed the solution by {rel}");
}

#[test]
fn oscillatory_problems_solve_under_the_same_contract() {
    let space = classified_space(16);
    let params = NitscheParams::penalty_free(10.0).unwrap();
    for n_osc in [3, 5] {
        let problem = oscillatory_problem(n_osc).unwrap();
        let load = assemble_load(&space, |x, y| (problem.f)(x, y));
        let scale = 1.0 + inf_norm(&load);
        for strategy in [SolverStrategy::FixedPoint, SolverStrategy::SemismoothNewton] {
            let config = SolverConfig {
                strategy,
                ..SolverConfig::default()
            };
            let (u, report) = solve_nonlinear(&space, &params, &problem, &config).unwrap();
            assert!(report.converged, "N = {n_osc}, {strategy:?}");
            assert!(report.final_residual_norm <= 1e-8 * scale);
            assert!(norm_broken_h1(&u) > 0.0);
        }
    }
}

#[test]
fn interpolated_guess_far_from_the_solution_still_converges() {
    let space = classified_space(8);
    let params = NitscheParams::penalty_free(10.0).unwrap();
    let problem = known_problem();
    let far = cr_interpolate(&space, |x, y| 3.0 * (x - y) - 2.0);
    let config = SolverConfig {
        initial_guess: Some(far.coefficients),
        ..SolverConfig::default()
    };
    let base = solve_nonlinear(&space, &params, &problem, &SolverConfig::default()).unwrap();
    let (u, report) = solve_nonlinear(&space, &params, &problem, &config).unwrap();
    assert!(report.converged);
    assert!(relative_gap(&u, &base.0) <= 1e-7);
}
