//! Time marching for the compact scheme.
//!
//! At every step the nonlinear system
//!
//! ```text
//! H [ c D(g)^n + psi(u^{n-1/2}, u^{n-1/2}) - (h^2/2) psi(w^{n-1/2}, u^{n-1/2}) - f^{n-1/2} ]
//!     = lambda delta_x^2 u^{n-1/2},          c = tau^{-1} / Gamma(1 - alpha),
//! g^n = xi1 u^n + xi2 u^{n-1},   H w^n = delta_x^2 u^n,
//! ```
//!
//! is solved by a fixed-point iteration: each sweep freezes `w` and the triple
//! sum of the semi-implicit convection form at the previous iterate and solves
//! one pentadiagonal system for the interior values of `u^{n,k+1}`.

use std::fmt;
use std::sync::Arc;

use crate::banded::BandedMatrix;
use crate::compact::{
    compact_average_apply, compose_average, psi_apply, psi_linearized_in_first,
    psi_linearized_in_second, psi_semi_implicit_diag, CompactAverage, PsiCoefficients,
};
use crate::error::{Error, Result};
use crate::fractional::{l1_explicit_part, HistoryBuffer, L1Weights};
use crate::mesh::{Grid1D, GridFunction, TimeMesh};

/// Function of one space variable.
pub type SpaceFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
/// Function of space and time.
pub type SpaceTimeFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Tolerance on `|phi1(0)|`, `|phi1(L)|` when checking boundary compatibility.
pub const BOUNDARY_COMPAT_TOL: f64 = 1e-12;

/// Coefficients, domain and data of one mixed-type fractional Burgers problem
///
/// `mu1 D^{alpha+1} u + mu2 D^alpha u + u u_x = lambda u_xx + f` on
/// `(0, L) x (0, T]` with `u(x, 0) = phi1`, `u_t(x, 0) = phi2` and zero
/// Dirichlet boundary values.
#[derive(Clone)]
pub struct ProblemSpec {
    pub key: String,
    pub mu1: f64,
    pub mu2: f64,
    pub lambda: f64,
    pub alpha: f64,
    pub length: f64,
    pub horizon: f64,
    pub phi1: SpaceFn,
    pub phi2: SpaceFn,
    pub source: SpaceTimeFn,
    pub exact: Option<SpaceTimeFn>,
}

impl fmt::Debug for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("key", &self.key)
            .field("mu1", &self.mu1)
            .field("mu2", &self.mu2)
            .field("lambda", &self.lambda)
            .field("alpha", &self.alpha)
            .field("length", &self.length)
            .field("horizon", &self.horizon)
            .field("has_exact", &self.exact.is_some())
            .finish()
    }
}

impl ProblemSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.mu1 >= 0.0 && self.mu2 >= 0.0) {
            return Err(Error::domain("mu1/mu2", "must be non-negative"));
        }
        if self.mu1 * self.mu1 + self.mu2 * self.mu2 == 0.0 {
            return Err(Error::domain("mu1/mu2", "mu1 and mu2 cannot both vanish"));
        }
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(Error::domain(
                "lambda",
                format!("must be positive, got {}", self.lambda),
            ));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::domain(
                "alpha",
                format!("must lie in (0, 1), got {}", self.alpha),
            ));
        }
        if !(self.length > 0.0 && self.horizon > 0.0) {
            return Err(Error::domain(
                "L/T",
                "domain length and horizon must be positive",
            ));
        }
        Ok(())
    }

    pub fn grid(&self, subdivisions: usize) -> Result<Grid1D> {
        Grid1D::new(self.length, subdivisions)
    }

    pub fn time_mesh(&self, steps: usize) -> Result<TimeMesh> {
        TimeMesh::new(self.horizon, steps)
    }

    /// Exact solution sampled at time `t`, if known.
    pub fn exact_at(&self, grid: Grid1D, t: f64) -> Option<GridFunction> {
        self.exact
            .as_ref()
            .map(|u| GridFunction::sample(grid, |x| u(x, t)))
    }

    /// Same problem with the initial value replaced by `phi1 + eps * sin(pi x / L)`.
    pub fn with_perturbed_initial_value(&self, eps: f64) -> ProblemSpec {
        let base = Arc::clone(&self.phi1);
        let l = self.length;
        let mut p = self.clone();
        p.phi1 = Arc::new(move |x| base(x) + eps * (std::f64::consts::PI * x / l).sin());
        p.exact = None;
        p
    }
}

/// `xi1 = mu1/tau + mu2/2`, `xi2 = mu2/2 - mu1/tau`, `theta = tau^alpha Gamma(1 - alpha)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationCoefficients {
    pub xi1: f64,
    pub xi2: f64,
    pub theta: f64,
}

impl IterationCoefficients {
    pub fn new(mu1: f64, mu2: f64, alpha: f64, tau: f64) -> Self {
        Self {
            xi1: mu1 / tau + mu2 / 2.0,
            xi2: mu2 / 2.0 - mu1 / tau,
            theta: tau.powf(alpha) * libm::tgamma(1.0 - alpha),
        }
    }

    /// `xi1 u^n + xi2 u^{n-1}`, i.e. `mu1 delta_t u^{n-1/2} + mu2 u^{n-1/2}`.
    pub fn mixed_value(&self, prev: &GridFunction, next: &GridFunction) -> GridFunction {
        next.linear_combination(self.xi1, prev, self.xi2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Stop when `||u^{n,k+1} - u^{n,k}||_inf` falls to this value.
    pub fp_tolerance: f64,
    pub max_fp_iterations: usize,
    /// Abort with [`Error::Blowup`] when an iterate turns non-finite.
    pub nan_guard: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            fp_tolerance: 1e-8,
            max_fp_iterations: 100,
            nan_guard: true,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.fp_tolerance > 0.0 && self.fp_tolerance.is_finite()) {
            return Err(Error::domain("fp_tolerance", "must be positive"));
        }
        if self.max_fp_iterations == 0 {
            return Err(Error::domain("max_fp_iterations", "must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    /// `(t_n, u^n)` for `n = 0..=N` when requested.
    pub trajectory: Option<Vec<(f64, GridFunction)>>,
    pub final_u: GridFunction,
    pub final_w: GridFunction,
    /// Fixed-point sweeps used at steps `1..=N`.
    pub iteration_counts: Vec<usize>,
    pub history: HistoryBuffer,
    /// `max_n ||U^n - u^n||_inf` when the problem has an exact solution.
    pub max_error: Option<f64>,
}

/// Samples the initial data: `u^0 = phi1`, `w^0` from `H w^0 = delta_x^2 u^0`,
/// and the first history entry `g^0 = mu1 phi2 + mu2 phi1`.
pub fn initialize(
    problem: &ProblemSpec,
    grid: Grid1D,
) -> Result<(GridFunction, GridFunction, HistoryBuffer)> {
    let left = (problem.phi1)(0.0);
    let right = (problem.phi1)(grid.length());
    if left.abs() > BOUNDARY_COMPAT_TOL || right.abs() > BOUNDARY_COMPAT_TOL {
        return Err(Error::Config(format!(
            "initial value must vanish on the boundary, got u(0) = {left:e}, u(L) = {right:e}"
        )));
    }
    let u0 = GridFunction::sample_dirichlet(grid, |x| (problem.phi1)(x));
    let slope = GridFunction::sample_dirichlet(grid, |x| (problem.phi2)(x));
    let w0 = CompactAverage::new(grid)?.recover_w(&u0);
    let g0 = slope.linear_combination(problem.mu1, &u0, problem.mu2);
    Ok((u0, w0, HistoryBuffer::new(g0)))
}

/// Owns the state of one time-marching run.
pub struct Solver {
    problem: ProblemSpec,
    grid: Grid1D,
    tmesh: TimeMesh,
    config: SolverConfig,
    weights: L1Weights,
    average: CompactAverage,
    coeffs: IterationCoefficients,
    /// `tau^{-1} / Gamma(1 - alpha)`.
    memory_scale: f64,
    history: HistoryBuffer,
    u_prev: GridFunction,
    w_prev: GridFunction,
    step: usize,
}

/// Per-step data that does not change across fixed-point sweeps.
struct StepContext {
    /// Explicit part of the bracket that `H` is applied to, boundary zeroed.
    bracket: GridFunction,
    /// `(lambda/2) delta_x^2 u^{n-1}`.
    diffusion: GridFunction,
    /// Stencil of the terms linear in `u^{n,k+1}` that do not depend on the iterate.
    fixed_stencil: PsiCoefficients,
    /// `psi(w^{n-1}, u^{n-1})`.
    psi_w_prev_u_prev: GridFunction,
}

impl Solver {
    pub fn new(
        problem: &ProblemSpec,
        grid: Grid1D,
        tmesh: TimeMesh,
        config: SolverConfig,
    ) -> Result<Self> {
        problem.validate()?;
        config.validate()?;
        let (u0, w0, history) = initialize(problem, grid)?;
        let tau = tmesh.step();
        let weights = L1Weights::new(problem.alpha, tau, tmesh.steps())?;
        let history = HistoryBuffer::with_capacity(history.get(0).clone(), tmesh.steps() + 1);
        Ok(Self {
            problem: problem.clone(),
            grid,
            tmesh,
            config,
            weights,
            average: CompactAverage::new(grid)?,
            coeffs: IterationCoefficients::new(problem.mu1, problem.mu2, problem.alpha, tau),
            memory_scale: 1.0 / (tau * libm::tgamma(1.0 - problem.alpha)),
            history,
            u_prev: u0,
            w_prev: w0,
            step: 0,
        })
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn time_mesh(&self) -> &TimeMesh {
        &self.tmesh
    }

    pub fn coefficients(&self) -> &IterationCoefficients {
        &self.coeffs
    }

    pub fn weights(&self) -> &L1Weights {
        &self.weights
    }

    pub fn history(&self) -> &HistoryBuffer {
        &self.history
    }

    /// Number of completed steps.
    pub fn steps_done(&self) -> usize {
        self.step
    }

    pub fn time(&self) -> f64 {
        self.tmesh.time(self.step)
    }

    pub fn current_u(&self) -> &GridFunction {
        &self.u_prev
    }

    pub fn current_w(&self) -> &GridFunction {
        &self.w_prev
    }

    /// `(f(., t_{n-1}) + f(., t_n)) / 2`, boundary zeroed.
    fn source_half_step(&self, n: usize) -> GridFunction {
        let (t0, t1) = (self.tmesh.time(n - 1), self.tmesh.time(n));
        let f = &self.problem.source;
        GridFunction::sample_dirichlet(self.grid, |x| 0.5 * (f(x, t0) + f(x, t1)))
    }

    fn context(&self) -> StepContext {
        let n = self.step + 1;
        let b0 = self.weights.implicit_coefficient();
        let c = self.memory_scale;
        let u_prev = &self.u_prev;

        let mut bracket = l1_explicit_part(&self.weights, &self.history, n);
        bracket.axpy(b0 * self.coeffs.xi2, u_prev);
        let mut bracket = bracket.scaled(c);
        bracket.axpy(0.25, &psi_apply(u_prev, u_prev));
        bracket.axpy(-1.0, &self.source_half_step(n));
        bracket.clear_boundary();

        let mut fixed_stencil = psi_linearized_in_first(u_prev);
        fixed_stencil.add_scaled(1.0, &psi_linearized_in_second(u_prev));
        let mut scaled = PsiCoefficients::zeros(self.grid);
        scaled.add_scaled(0.25, &fixed_stencil);
        scaled.add_diagonal(c * b0 * self.coeffs.xi1);

        StepContext {
            bracket,
            diffusion: u_prev.second_diff_all().scaled(0.5 * self.problem.lambda),
            fixed_stencil: scaled,
            psi_w_prev_u_prev: psi_apply(&self.w_prev, u_prev),
        }
    }

    fn assemble(
        &self,
        ctx: &StepContext,
        u_lag: &GridFunction,
        w_lag: &GridFunction,
    ) -> (BandedMatrix, Vec<f64>) {
        let h = self.grid.step();
        let m = self.grid.subdivisions();
        let half_lambda = 0.5 * self.problem.lambda;

        let mut stencil = ctx.fixed_stencil.clone();
        stencil.add_scaled(0.25, &psi_semi_implicit_diag(u_lag));
        let mut a = compose_average(&stencil);
        let d = half_lambda / (h * h);
        for r in 0..m - 1 {
            a.add(r, r, 2.0 * d);
            if r > 0 {
                a.add(r, r - 1, -d);
            }
            if r + 2 < m {
                a.add(r, r + 1, -d);
            }
        }

        // psi(w^{n-1/2}, u^{n-1/2}) expanded into four terms, fully lagged
        let u_prev = &self.u_prev;
        let mut lagged = psi_apply(w_lag, u_lag);
        lagged.axpy(1.0, &psi_apply(w_lag, u_prev));
        lagged.axpy(1.0, &psi_apply(&self.w_prev, u_lag));
        lagged.axpy(1.0, &ctx.psi_w_prev_u_prev);

        let mut bracket = ctx.bracket.clone();
        bracket.axpy(-0.25 * 0.5 * h * h, &lagged);
        bracket.clear_boundary();
        let hb = compact_average_apply(&bracket);
        let rhs = (1..m).map(|i| ctx.diffusion[i] - hb[i]).collect();
        (a, rhs)
    }

    /// Linear system for `u^{n,k+1}` (interior nodes) at the next step, given the
    /// lagged iterate `u^{n,k}` and `w^{n,k}`.
    pub fn assemble_iteration_system(
        &self,
        u_lag: &GridFunction,
        w_lag: &GridFunction,
    ) -> (BandedMatrix, Vec<f64>) {
        let ctx = self.context();
        self.assemble(&ctx, u_lag, w_lag)
    }

    /// Advances one step by fixed-point iteration; returns the number of sweeps.
    pub fn step(&mut self) -> Result<usize> {
        let n = self.step + 1;
        assert!(n <= self.tmesh.steps(), "time horizon already reached");
        let ctx = self.context();
        let mut u_k = self.u_prev.clone();
        let mut last_increment = f64::INFINITY;
        for k in 0..self.config.max_fp_iterations {
            let w_k = self.average.recover_w(&u_k);
            let (a, rhs) = self.assemble(&ctx, &u_k, &w_k);
            let lu = a.factor()?;
            let mut u_next = GridFunction::zeros(self.grid);
            u_next.interior_mut().copy_from_slice(&lu.solve(&rhs));
            if self.config.nan_guard && !u_next.is_finite() {
                return Err(Error::Blowup {
                    step: n,
                    iteration: k + 1,
                });
            }
            last_increment = u_next.sup_distance(&u_k);
            u_k = u_next;
            if last_increment <= self.config.fp_tolerance {
                self.accept_state(u_k);
                return Ok(k + 1);
            }
        }
        Err(Error::StepDivergence {
            step: n,
            iterations: self.config.max_fp_iterations,
            last_increment,
        })
    }

    /// Accepts `u_next` as the solution at the next time level: recovers `w`,
    /// appends the mixed value to the history and advances the step counter.
    ///
    /// [`Solver::step`] calls this after convergence; calling it directly lets
    /// the scheme be driven along a prescribed sequence (e.g. exact samples).
    pub fn accept_state(&mut self, mut u_next: GridFunction) {
        assert_eq!(*u_next.grid(), self.grid);
        assert!(
            self.step < self.tmesh.steps(),
            "time horizon already reached"
        );
        u_next.clear_boundary();
        let w_next = self.average.recover_w(&u_next);
        let g = self.coeffs.mixed_value(&self.u_prev, &u_next);
        self.history.push(g);
        self.u_prev = u_next;
        self.w_prev = w_next;
        self.step += 1;
    }

    /// Residual of the full nonlinear scheme at the next step for a candidate
    /// `u^n` (interior nodes; boundary zero). Zero at an exact fixed point.
    pub fn scheme_residual(&self, u_next: &GridFunction) -> GridFunction {
        let n = self.step + 1;
        let h = self.grid.step();
        let w_next = self.average.recover_w(u_next);
        let u_half = GridFunction::half_step_average(&self.u_prev, u_next);
        let w_half = GridFunction::half_step_average(&self.w_prev, &w_next);

        let g = self.coeffs.mixed_value(&self.u_prev, u_next);
        let mut memory = l1_explicit_part(&self.weights, &self.history, n);
        memory.axpy(self.weights.implicit_coefficient(), &g);

        let mut bracket = memory.scaled(self.memory_scale);
        bracket.axpy(1.0, &psi_apply(&u_half, &u_half));
        bracket.axpy(-0.5 * h * h, &psi_apply(&w_half, &u_half));
        bracket.axpy(-1.0, &self.source_half_step(n));
        bracket.clear_boundary();

        let mut r = compact_average_apply(&bracket);
        r.axpy(-self.problem.lambda, &u_half.second_diff_all());
        r.clear_boundary();
        r
    }

    /// Consumes the solver, returning `(u^N, w^N, history)`.
    pub fn into_parts(self) -> (GridFunction, GridFunction, HistoryBuffer) {
        (self.u_prev, self.w_prev, self.history)
    }
}

/// Marches the scheme over `n = 1..=N`.
pub fn solve(
    problem: &ProblemSpec,
    grid: Grid1D,
    tmesh: TimeMesh,
    config: SolverConfig,
    keep_trajectory: bool,
) -> Result<SolveResult> {
    let mut solver = Solver::new(problem, grid, tmesh, config)?;
    let mut trajectory = keep_trajectory.then(|| {
        let mut v = Vec::with_capacity(tmesh.steps() + 1);
        v.push((0.0, solver.current_u().clone()));
        v
    });
    let error_at = |s: &Solver| {
        problem
            .exact_at(grid, s.time())
            .map(|exact| exact.sup_distance(s.current_u()))
    };
    let mut max_error = error_at(&solver);
    let mut iteration_counts = Vec::with_capacity(tmesh.steps());
    for _ in 0..tmesh.steps() {
        iteration_counts.push(solver.step()?);
        if let Some(tr) = trajectory.as_mut() {
            tr.push((solver.time(), solver.current_u().clone()));
        }
        if let (Some(m), Some(e)) = (max_error.as_mut(), error_at(&solver)) {
            *m = m.max(e);
        }
    }
    let (final_u, final_w, history) = solver.into_parts();
    Ok(SolveResult {
        trajectory,
        final_u,
        final_w,
        iteration_counts,
        history,
        max_error,
    })
}
