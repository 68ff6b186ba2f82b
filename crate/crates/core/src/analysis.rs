//! Error metrics and refinement studies.
//!
//! Studies run one independent solve per refinement parameter, optionally on a
//! worker pool. Rows are always assembled in refinement order, so reports do
//! not depend on the number of workers.

use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::mesh::{Grid1D, GridFunction, TimeMesh};
use crate::stepper::{solve, ProblemSpec, SolveResult, SolverConfig};

/// Errors below this are treated as exact; no order is reported next to them.
pub const DEGENERATE_ERROR: f64 = 1e-13;

/// Which error a report tabulates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    /// `max_n ||U^n - u^n||_inf` against the exact solution.
    SupOverTime,
    /// `max_i |u_i^N(tau) - u_i^{2N}(tau/2)|`.
    SelfTime,
    /// `max_i |u_i^N(h) - u_{2i}^N(h/2)|`.
    SelfSpace,
}

impl Metric {
    pub fn name(&self) -> &'static str {
        match self {
            Metric::SupOverTime => "E_inf",
            Metric::SelfTime => "F1_inf",
            Metric::SelfSpace => "G1_inf",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        [Metric::SupOverTime, Metric::SelfTime, Metric::SelfSpace]
            .into_iter()
            .find(|m| m.name() == s)
    }
}

/// Which mesh parameter a study refines.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Refined {
    /// `N` varies, `M` fixed.
    Time,
    /// `M` varies, `N` fixed.
    Space,
}

impl Refined {
    /// Name of the parameter held fixed.
    pub fn fixed_name(&self) -> &'static str {
        match self {
            Refined::Time => "M",
            Refined::Space => "N",
        }
    }

    /// Name of the parameter being refined.
    pub fn refined_name(&self) -> &'static str {
        match self {
            Refined::Time => "N",
            Refined::Space => "M",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportMetadata {
    pub problem: String,
    pub alpha: f64,
    pub mu1: f64,
    pub mu2: f64,
    pub lambda: f64,
    pub refined: Refined,
    pub fixed_value: usize,
    pub metric: Metric,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReportRow {
    /// `N` or `M` for this row.
    pub param: usize,
    pub error: f64,
    /// `log2(previous error / error)`; absent on the first row, after a
    /// non-doubling step, or when either error is degenerate.
    pub order: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub metadata: ReportMetadata,
    pub rows: Vec<ReportRow>,
}

impl ConvergenceReport {
    /// Builds rows from `(param, error)` pairs, computing orders.
    pub fn from_errors(metadata: ReportMetadata, errors: &[(usize, f64)]) -> Self {
        let rows = errors
            .iter()
            .enumerate()
            .map(|(k, &(param, error))| {
                let order = (k > 0)
                    .then(|| errors[k - 1])
                    .and_then(|(prev_param, prev_error)| {
                        convergence_order(prev_param, prev_error, param, error)
                    });
                ReportRow {
                    param,
                    error,
                    order,
                }
            })
            .collect();
        Self { metadata, rows }
    }

    pub fn orders(&self) -> Vec<Option<f64>> {
        self.rows.iter().map(|r| r.order).collect()
    }

    pub fn errors(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.error).collect()
    }
}

impl fmt::Display for ConvergenceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let md = &self.metadata;
        writeln!(
            f,
            "{} alpha={} mu1={} mu2={} lambda={} {}={}",
            md.problem,
            md.alpha,
            md.mu1,
            md.mu2,
            md.lambda,
            md.refined.fixed_name(),
            md.fixed_value
        )?;
        writeln!(
            f,
            "{:>8}  {:>12}  {:>7}",
            md.refined.refined_name(),
            md.metric.name(),
            "order"
        )?;
        for r in &self.rows {
            let order = r
                .order
                .map_or_else(|| "*".to_string(), |o| format!("{o:.3}"));
            writeln!(f, "{:>8}  {:>12.3e}  {:>7}", r.param, r.error, order)?;
        }
        Ok(())
    }
}

/// `log2(coarse_error / fine_error)` when `fine_param == 2 * coarse_param`
/// and both errors are above [`DEGENERATE_ERROR`].
pub fn convergence_order(
    coarse_param: usize,
    coarse_error: f64,
    fine_param: usize,
    fine_error: f64,
) -> Option<f64> {
    if fine_param != 2 * coarse_param {
        return None;
    }
    if !(coarse_error > DEGENERATE_ERROR && fine_error > DEGENERATE_ERROR) {
        return None;
    }
    Some((coarse_error / fine_error).log2())
}

/// Checks that every entry doubles the previous one.
pub fn check_doubling(list: &[usize]) -> Result<()> {
    if list.is_empty() {
        return Err(Error::domain("refine", "refinement list is empty"));
    }
    for w in list.windows(2) {
        if w[1] != 2 * w[0] {
            return Err(Error::domain(
                "refine",
                format!("refinement list must double: {} != 2 * {}", w[1], w[0]),
            ));
        }
    }
    Ok(())
}

/// Solver settings and worker count shared by all studies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StudyOptions {
    pub solver: SolverConfig,
    /// Worker threads used for independent solves; `<= 1` runs sequentially.
    pub workers: usize,
}

impl Default for StudyOptions {
    fn default() -> Self {
        Self {
            solver: SolverConfig::default(),
            workers: 1,
        }
    }
}

/// Maps `f` over `items`, in parallel when `workers > 1`, preserving order.
fn run_rows<T, F>(items: &[usize], workers: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    let annotate = |p: usize| {
        f(p).map_err(|e| Error::Row {
            param: p,
            source: Box::new(e),
        })
    };
    if workers <= 1 {
        return items.iter().map(|&p| annotate(p)).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    pool.install(|| items.par_iter().map(|&p| annotate(p)).collect())
}

/// `E_inf = max_{0<=n<=N} ||U^n - u^n||_inf`.
///
/// Uses the stored trajectory when present, the running maximum otherwise.
pub fn error_sup_over_time(result: &SolveResult, problem: &ProblemSpec) -> Result<f64> {
    let exact = problem
        .exact
        .as_ref()
        .ok_or_else(|| Error::MissingExact(problem.key.clone()))?;
    match &result.trajectory {
        Some(traj) => Ok(traj
            .iter()
            .map(|(t, u)| {
                let e = GridFunction::sample(*u.grid(), |x| exact(x, *t));
                e.sup_distance(u)
            })
            .fold(0.0, f64::max)),
        None => result
            .max_error
            .ok_or_else(|| Error::MissingExact(problem.key.clone())),
    }
}

fn metadata(
    problem: &ProblemSpec,
    refined: Refined,
    fixed: usize,
    metric: Metric,
) -> ReportMetadata {
    ReportMetadata {
        problem: problem.key.clone(),
        alpha: problem.alpha,
        mu1: problem.mu1,
        mu2: problem.mu2,
        lambda: problem.lambda,
        refined,
        fixed_value: fixed,
        metric,
    }
}

fn solve_on(
    problem: &ProblemSpec,
    m: usize,
    n: usize,
    config: SolverConfig,
) -> Result<SolveResult> {
    solve(
        problem,
        problem.grid(m)?,
        problem.time_mesh(n)?,
        config,
        false,
    )
}

/// `E_inf` for each `N` in `steps` with `M` fixed.
pub fn temporal_order_study(
    problem: &ProblemSpec,
    subdivisions: usize,
    steps: &[usize],
    options: StudyOptions,
) -> Result<ConvergenceReport> {
    exact_study(problem, Refined::Time, subdivisions, steps, options)
}

/// `E_inf` for each `M` in `subdivisions` with `N` fixed.
pub fn spatial_order_study(
    problem: &ProblemSpec,
    steps: usize,
    subdivisions: &[usize],
    options: StudyOptions,
) -> Result<ConvergenceReport> {
    exact_study(problem, Refined::Space, steps, subdivisions, options)
}

fn exact_study(
    problem: &ProblemSpec,
    refined: Refined,
    fixed: usize,
    list: &[usize],
    options: StudyOptions,
) -> Result<ConvergenceReport> {
    check_doubling(list)?;
    if problem.exact.is_none() {
        return Err(Error::MissingExact(problem.key.clone()));
    }
    let errors = run_rows(list, options.workers, |p| {
        let (m, n) = match refined {
            Refined::Time => (fixed, p),
            Refined::Space => (p, fixed),
        };
        let r = solve_on(problem, m, n, options.solver)?;
        Ok((p, error_sup_over_time(&r, problem)?))
    })?;
    Ok(ConvergenceReport::from_errors(
        metadata(problem, refined, fixed, Metric::SupOverTime),
        &errors,
    ))
}

/// `F1_inf(N) = max_i |u_i^N(tau) - u_i^{2N}(tau/2)|` for each `N` in `steps`.
pub fn self_convergence_time(
    problem: &ProblemSpec,
    subdivisions: usize,
    steps: &[usize],
    options: StudyOptions,
) -> Result<ConvergenceReport> {
    check_doubling(steps)?;
    let mut all = steps.to_vec();
    all.push(2 * steps[steps.len() - 1]);
    let finals = run_rows(&all, options.workers, |n| {
        Ok(solve_on(problem, subdivisions, n, options.solver)?.final_u)
    })?;
    let errors: Vec<(usize, f64)> = steps
        .iter()
        .enumerate()
        .map(|(k, &n)| (n, finals[k].sup_distance(&finals[k + 1])))
        .collect();
    Ok(ConvergenceReport::from_errors(
        metadata(problem, Refined::Time, subdivisions, Metric::SelfTime),
        &errors,
    ))
}

/// `max_i |coarse_i - fine_{2i}|`; `fine` must live on the refined grid.
pub fn coarse_fine_distance(coarse: &GridFunction, fine: &GridFunction) -> f64 {
    assert_eq!(
        coarse.grid().refined(),
        *fine.grid(),
        "fine grid is not the refinement"
    );
    coarse
        .values()
        .iter()
        .enumerate()
        .map(|(i, c)| (c - fine[2 * i]).abs())
        .fold(0.0, f64::max)
}

/// `G1_inf(M) = max_i |u_i^N(h) - u_{2i}^N(h/2)|` for each `M` in `subdivisions`.
pub fn self_convergence_space(
    problem: &ProblemSpec,
    steps: usize,
    subdivisions: &[usize],
    options: StudyOptions,
) -> Result<ConvergenceReport> {
    check_doubling(subdivisions)?;
    let mut all = subdivisions.to_vec();
    all.push(2 * subdivisions[subdivisions.len() - 1]);
    let finals = run_rows(&all, options.workers, |m| {
        Ok(solve_on(problem, m, steps, options.solver)?.final_u)
    })?;
    let errors: Vec<(usize, f64)> = subdivisions
        .iter()
        .enumerate()
        .map(|(k, &m)| (m, coarse_fine_distance(&finals[k], &finals[k + 1])))
        .collect();
    Ok(ConvergenceReport::from_errors(
        metadata(problem, Refined::Space, steps, Metric::SelfSpace),
        &errors,
    ))
}

/// `||u^N(phi1 + eps sin(pi x/L)) - u^N(phi1)||_inf / eps`.
pub fn perturbation_amplification(
    problem: &ProblemSpec,
    grid: Grid1D,
    tmesh: TimeMesh,
    epsilon: f64,
    config: SolverConfig,
) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::domain(
            "epsilon",
            format!("must be positive, got {epsilon}"),
        ));
    }
    let base = solve(problem, grid, tmesh, config, false)?;
    let perturbed = solve(
        &problem.with_perturbed_initial_value(epsilon),
        grid,
        tmesh,
        config,
        false,
    )?;
    Ok(base.final_u.sup_distance(&perturbed.final_u) / epsilon)
}
