//! Time marching: initialization, assembly, fixed-point behaviour and failures.

use std::sync::Arc;

use fracburgers::problems::{example1, example2, example3};
use fracburgers::stepper::initialize;
use fracburgers::{
    solve, Error, Grid1D, GridFunction, IterationCoefficients, ProblemSpec, Solver, SolverConfig,
    TimeMesh,
};
use proptest::prelude::*;

fn homogeneous(alpha: f64) -> ProblemSpec {
    let mut p = example3(alpha, 1.0, 1.0, 1.0);
    p.key = "zero".into();
    p.phi1 = Arc::new(|_| 0.0);
    p
}

fn solver(p: &ProblemSpec, m: usize, n: usize, config: SolverConfig) -> Solver {
    Solver::new(p, p.grid(m).unwrap(), p.time_mesh(n).unwrap(), config).unwrap()
}

#[test]
fn initial_state_of_examples() {
    let p = example1(0.5, 1.0, 1.0, 1.0);
    let grid = Grid1D::new(1.0, 16).unwrap();
    let (u0, w0, h) = initialize(&p, grid).unwrap();
    assert!(u0.is_dirichlet() && w0.is_dirichlet());
    assert_eq!(h.len(), 1);
    for (i, x) in grid.nodes().enumerate() {
        assert!((u0[i] - (std::f64::consts::PI * x).sin()).abs() < 1e-15);
        // g0 = mu1 phi2 + mu2 phi1 with phi2 = 0
        assert!((h.get(0)[i] - u0[i]).abs() < 1e-15);
    }
    // w0 approximates u_xx = -pi^2 sin(pi x) to fourth order
    let pi2 = std::f64::consts::PI.powi(2);
    let err = (1..16)
        .map(|i| (w0[i] + pi2 * u0[i]).abs())
        .fold(0.0, f64::max);
    assert!(err < 1e-4, "{err}");

    let (u0, w0, h) = initialize(&example2(1.0, 1.0, 1.0), grid).unwrap();
    assert_eq!(u0.sup_norm(), 0.0);
    assert_eq!(w0.sup_norm(), 0.0);
    assert_eq!(h.get(0).sup_norm(), 0.0);
}

#[test]
fn incompatible_boundary_data_is_rejected() {
    let mut p = example1(0.5, 1.0, 1.0, 1.0);
    p.phi1 = Arc::new(|x| 1.0 + x);
    let grid = Grid1D::new(1.0, 8).unwrap();
    assert!(matches!(initialize(&p, grid), Err(Error::Config(_))));
    let tm = TimeMesh::new(1.0, 4).unwrap();
    assert!(Solver::new(&p, grid, tm, SolverConfig::default()).is_err());
}

#[test]
fn zero_state_gives_zero_right_hand_side() {
    let p = homogeneous(0.5);
    let s = solver(&p, 8, 4, SolverConfig::default());
    let zero = GridFunction::zeros(*s.grid());
    let (a, rhs) = s.assemble_iteration_system(&zero, &zero);
    assert_eq!(a.dim(), 7);
    assert!(rhs.iter().all(|&r| r == 0.0));
}

#[test]
fn iteration_matrix_is_pentadiagonal() {
    let p = example1(0.5, 1.0, 1.0, 1.0);
    let s = solver(&p, 16, 8, SolverConfig::default());
    let u = s.current_u().clone();
    let (a, rhs) = s.assemble_iteration_system(&u, s.current_w());
    assert_eq!(rhs.len(), 15);
    for r in 0..15 {
        assert!(a.row_nonzeros(r) <= 5, "row {r}");
        for c in 0..15 {
            if r.abs_diff(c) > 2 {
                assert_eq!(a.get(r, c), 0.0);
            }
        }
    }
    assert!(a.row_nonzeros(0) <= 3 && a.row_nonzeros(14) <= 3);
}

/// Largest scheme residual along the exact solution, over all steps.
fn exact_residual(p: &ProblemSpec, m: usize, n: usize) -> f64 {
    let mut s = solver(p, m, n, SolverConfig::default());
    let grid = *s.grid();
    let mut worst: f64 = 0.0;
    for k in 1..=n {
        let exact = p.exact_at(grid, s.time_mesh().time(k)).unwrap();
        worst = worst.max(s.scheme_residual(&exact).sup_norm());
        s.accept_state(exact);
    }
    worst
}

#[test]
fn exact_solution_is_consistent_with_scheme() {
    let p = example1(0.5, 1.0, 1.0, 1.0);
    let coarse = exact_residual(&p, 16, 32);
    let fine = exact_residual(&p, 32, 64);
    let rate = (coarse / fine).log2();
    assert!(
        fine < coarse && rate > 1.0,
        "residuals {coarse:e} {fine:e}, rate {rate}"
    );
}

#[test]
fn example1_converges_in_few_sweeps() {
    let p = example1(0.5, 1.0, 1.0, 1.0);
    let r = solve(
        &p,
        p.grid(80).unwrap(),
        p.time_mesh(64).unwrap(),
        SolverConfig::default(),
        true,
    )
    .unwrap();
    assert_eq!(r.iteration_counts.len(), 64);
    assert!(r.iteration_counts.iter().all(|&k| (1..=10).contains(&k)));
    assert_eq!(r.trajectory.as_ref().unwrap().len(), 65);
    assert!(r.final_u.is_dirichlet() && r.final_w.is_dirichlet());
    let err = r.max_error.unwrap();
    assert!(err < 1e-3, "{err}");
    assert_eq!(r.history.len(), 65);
}

#[test]
fn tighter_tolerance_changes_solution_little() {
    let p = example1(0.5, 1.0, 1.0, 1.0);
    let run = |tol| {
        let c = SolverConfig {
            fp_tolerance: tol,
            ..SolverConfig::default()
        };
        solve(&p, p.grid(32).unwrap(), p.time_mesh(32).unwrap(), c, false).unwrap()
    };
    let (a, b) = (run(1e-8), run(1e-10));
    assert!(a.final_u.sup_distance(&b.final_u) <= 1e-7);
    let sweeps = |r: &fracburgers::SolveResult| r.iteration_counts.iter().sum::<usize>();
    assert!(sweeps(&b) >= sweeps(&a));
}

#[test]
fn homogeneous_problem_stays_at_rest() {
    for n in [1, 5] {
        let p = homogeneous(0.3);
        let r = solve(
            &p,
            p.grid(8).unwrap(),
            p.time_mesh(n).unwrap(),
            SolverConfig::default(),
            false,
        )
        .unwrap();
        assert_eq!(r.iteration_counts, vec![1; n]);
        assert_eq!(r.final_u.sup_norm(), 0.0);
        assert!(r.max_error.is_none());
    }
}

#[test]
fn steps_keep_boundary_zero() {
    let p = example3(0.5, 1.0, 1.0, 0.1);
    let mut s = solver(&p, 20, 10, SolverConfig::default());
    for k in 1..=10 {
        s.step().unwrap();
        assert_eq!(s.steps_done(), k);
        assert!(s.current_u().is_dirichlet() && s.current_w().is_dirichlet());
    }
    assert!((s.time() - 1.0).abs() < 1e-15);
}

#[test]
fn converged_step_solves_nonlinear_scheme() {
    let p = example1(0.5, 1.0, 1.0, 1.0);
    let config = SolverConfig::default();
    let mut stepped = solver(&p, 40, 16, config);
    stepped.step().unwrap();
    let u1 = stepped.current_u().clone();
    let fresh = solver(&p, 40, 16, config);
    let (a, _) = fresh.assemble_iteration_system(&u1, stepped.current_w());
    let res = fresh.scheme_residual(&u1).sup_norm();
    assert!(
        res <= 10.0 * config.fp_tolerance * a.norm_inf(),
        "{res:e} vs {:e}",
        a.norm_inf()
    );
}

#[test]
fn single_derivative_limits_run() {
    for (m1, m2) in [(0.0, 1.0), (1.0, 0.0)] {
        let p = example1(0.5, m1, m2, 1.0);
        let r = solve(
            &p,
            p.grid(32).unwrap(),
            p.time_mesh(64).unwrap(),
            SolverConfig::default(),
            false,
        )
        .unwrap();
        let err = r.max_error.unwrap();
        assert!(err < 1e-2, "mu=({m1},{m2}): {err}");
    }
}

#[test]
fn iteration_cap_reports_divergence() {
    let p = example1(0.5, 1.0, 1.0, 1.0);
    let c = SolverConfig {
        fp_tolerance: 1e-14,
        max_fp_iterations: 1,
        nan_guard: true,
    };
    let err = solve(&p, p.grid(16).unwrap(), p.time_mesh(8).unwrap(), c, false).unwrap_err();
    assert!(err.is_solver_failure());
    match err {
        Error::StepDivergence {
            step,
            iterations,
            last_increment,
        } => {
            assert_eq!((step, iterations), (1, 1));
            assert!(last_increment > 1e-14);
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn non_finite_iterate_is_caught() {
    let mut p = example1(0.5, 1.0, 1.0, 1.0);
    p.source = Arc::new(|_, t| if t > 0.2 { f64::NAN } else { 0.0 });
    let err = solve(
        &p,
        p.grid(8).unwrap(),
        p.time_mesh(8).unwrap(),
        SolverConfig::default(),
        false,
    )
    .unwrap_err();
    assert!(
        matches!(
            err,
            Error::Blowup {
                step: 2,
                iteration: 1
            }
        ),
        "{err:?}"
    );
    assert!(err.is_solver_failure());
}

#[test]
fn rejects_bad_configuration() {
    let p = example1(0.5, 1.0, 1.0, 1.0);
    let g = p.grid(8).unwrap();
    let t = p.time_mesh(4).unwrap();
    for c in [
        SolverConfig {
            fp_tolerance: 0.0,
            ..SolverConfig::default()
        },
        SolverConfig {
            max_fp_iterations: 0,
            ..SolverConfig::default()
        },
    ] {
        assert!(Solver::new(&p, g, t, c).is_err());
    }
}

proptest! {
    #[test]
    fn mixed_value_matches_definition(
        mu1 in 0.0f64..5.0, mu2 in 0.0f64..5.0, alpha in 0.01f64..0.99, n in 1usize..2000,
        a in -2.0f64..2.0, b in -2.0f64..2.0,
    ) {
        let tau = 1.0 / n as f64;
        let c = IterationCoefficients::new(mu1, mu2, alpha, tau);
        prop_assert!((c.xi1 + c.xi2 - mu2).abs() <= 1e-12 * (1.0 + mu2));
        prop_assert!((c.xi1 - c.xi2 - 2.0 * mu1 / tau).abs() <= 1e-12 * (1.0 + mu1 / tau));
        let theta = tau.powf(alpha) * libm::tgamma(1.0 - alpha);
        prop_assert!((c.theta - theta).abs() <= 1e-14 * theta);

        let g = Grid1D::new(1.0, 4).unwrap();
        let prev = GridFunction::from_values(g, vec![0.0, a, b, a, 0.0]);
        let next = GridFunction::from_values(g, vec![0.0, b, a, b, 0.0]);
        let mv = c.mixed_value(&prev, &next);
        let expect = GridFunction::time_diff(&prev, &next, tau)
            .linear_combination(mu1, &GridFunction::half_step_average(&prev, &next), mu2);
        let scale = (1.0 + mu1 / tau) * 4.0;
        prop_assert!(mv.sup_distance(&expect) <= 1e-12 * scale);
    }
}
