//! Uniform meshes, grid functions and the discrete difference operators,
//! inner products and norms used throughout the scheme.
//!
//! Grid functions store all `M + 1` nodes, boundaries included. Operators that
//! are only meaningful away from the boundary take an index and panic when it
//! is out of range.

use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};

/// Smallest admissible number of spatial subdivisions.
pub const MIN_SUBDIVISIONS: usize = 2;

/// Uniform spatial mesh `x_i = i h` on `[0, L]`, `h = L / M`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    length: f64,
    subdivisions: usize,
    step: f64,
}

impl Grid1D {
    pub fn new(length: f64, subdivisions: usize) -> Result<Self> {
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::domain(
                "length",
                format!("must be positive, got {length}"),
            ));
        }
        if subdivisions < MIN_SUBDIVISIONS {
            return Err(Error::domain(
                "M",
                format!("need at least {MIN_SUBDIVISIONS} subdivisions, got {subdivisions}"),
            ));
        }
        Ok(Self {
            length,
            subdivisions,
            step: length / subdivisions as f64,
        })
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Number of subdivisions `M`.
    pub fn subdivisions(&self) -> usize {
        self.subdivisions
    }

    /// Number of nodes, `M + 1`.
    pub fn len(&self) -> usize {
        self.subdivisions + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Mesh width `h`.
    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn node(&self, i: usize) -> f64 {
        assert!(i <= self.subdivisions, "node index {i} out of range");
        i as f64 * self.step
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..=self.subdivisions).map(move |i| i as f64 * self.step)
    }

    /// Grid with twice as many subdivisions; coarse node `i` coincides with fine node `2i`.
    pub fn refined(&self) -> Self {
        Self::new(self.length, 2 * self.subdivisions).expect("refinement of a valid grid")
    }
}

/// Uniform time mesh `t_n = n tau` on `[0, T]`, `tau = T / N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeMesh {
    horizon: f64,
    steps: usize,
    step: f64,
}

impl TimeMesh {
    pub fn new(horizon: f64, steps: usize) -> Result<Self> {
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(Error::domain(
                "horizon",
                format!("must be positive, got {horizon}"),
            ));
        }
        if steps == 0 {
            return Err(Error::domain("N", "need at least one time step"));
        }
        Ok(Self {
            horizon,
            steps,
            step: horizon / steps as f64,
        })
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// Number of time steps `N`.
    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Time step `tau`.
    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn time(&self, n: usize) -> f64 {
        n as f64 * self.step
    }
}

/// Values of a field at every node of a [`Grid1D`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: Grid1D,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn zeros(grid: Grid1D) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.len()],
        }
    }

    /// Wraps node values; panics if the length is not `M + 1`.
    pub fn from_values(grid: Grid1D, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), grid.len(), "grid function length mismatch");
        Self { grid, values }
    }

    /// Samples `f` at every node.
    pub fn sample(grid: Grid1D, f: impl Fn(f64) -> f64) -> Self {
        Self {
            grid,
            values: grid.nodes().map(f).collect(),
        }
    }

    /// Samples `f` at interior nodes and sets both boundary values to zero.
    pub fn sample_dirichlet(grid: Grid1D, f: impl Fn(f64) -> f64) -> Self {
        let mut v = Self::sample(grid, f);
        v.clear_boundary();
        v
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Interior values `v_1 .. v_{M-1}`.
    pub fn interior(&self) -> &[f64] {
        &self.values[1..self.grid.subdivisions]
    }

    pub fn interior_mut(&mut self) -> &mut [f64] {
        let m = self.grid.subdivisions;
        &mut self.values[1..m]
    }

    pub fn clear_boundary(&mut self) {
        let m = self.grid.subdivisions;
        self.values[0] = 0.0;
        self.values[m] = 0.0;
    }

    /// Whether both boundary values are exactly zero.
    pub fn is_dirichlet(&self) -> bool {
        self.values[0] == 0.0 && self.values[self.grid.subdivisions] == 0.0
    }

    fn check_same_grid(&self, other: &GridFunction) {
        assert_eq!(
            self.grid, other.grid,
            "grid functions live on different grids"
        );
    }

    /// `delta_x v_{i-1/2} = (v_i - v_{i-1}) / h`, `1 <= i <= M`.
    pub fn diff_forward_half(&self, i: usize) -> f64 {
        assert!(
            (1..=self.grid.subdivisions).contains(&i),
            "half-node index {i} out of range 1..={}",
            self.grid.subdivisions
        );
        (self.values[i] - self.values[i - 1]) / self.grid.step
    }

    /// `Delta_x v_i = (v_{i+1} - v_{i-1}) / (2h)`, interior `i` only.
    pub fn central_diff(&self, i: usize) -> f64 {
        self.check_interior(i);
        (self.values[i + 1] - self.values[i - 1]) / (2.0 * self.grid.step)
    }

    /// `delta_x^2 v_i = (v_{i+1} - 2 v_i + v_{i-1}) / h^2`, interior `i` only.
    pub fn second_diff(&self, i: usize) -> f64 {
        self.check_interior(i);
        let h = self.grid.step;
        (self.values[i + 1] - 2.0 * self.values[i] + self.values[i - 1]) / (h * h)
    }

    fn check_interior(&self, i: usize) {
        assert!(
            (1..self.grid.subdivisions).contains(&i),
            "interior index {i} out of range 1..{}",
            self.grid.subdivisions
        );
    }

    /// `delta_x^2 v` at every interior node, zero on the boundary.
    pub fn second_diff_all(&self) -> GridFunction {
        let mut out = GridFunction::zeros(self.grid);
        for i in 1..self.grid.subdivisions {
            out.values[i] = self.second_diff(i);
        }
        out
    }

    /// `Delta_x v` at every interior node, zero on the boundary.
    pub fn central_diff_all(&self) -> GridFunction {
        let mut out = GridFunction::zeros(self.grid);
        for i in 1..self.grid.subdivisions {
            out.values[i] = self.central_diff(i);
        }
        out
    }

    /// `<u, v> = h sum_{i=1}^{M-1} u_i v_i`.
    pub fn inner_product(&self, other: &GridFunction) -> f64 {
        self.check_same_grid(other);
        let s: f64 = self
            .interior()
            .iter()
            .zip(other.interior())
            .map(|(a, b)| a * b)
            .sum();
        self.grid.step * s
    }

    /// `(u, v) = h sum_{i=1}^{M} delta_x u_{i-1/2} delta_x v_{i-1/2}`.
    pub fn h1_inner_product(&self, other: &GridFunction) -> f64 {
        self.check_same_grid(other);
        let s: f64 = (1..=self.grid.subdivisions)
            .map(|i| self.diff_forward_half(i) * other.diff_forward_half(i))
            .sum();
        self.grid.step * s
    }

    /// `|v|_1`.
    pub fn h1_seminorm(&self) -> f64 {
        self.h1_inner_product(self).sqrt()
    }

    /// `||v|| = sqrt(<v, v>)`.
    pub fn l2_norm(&self) -> f64 {
        self.inner_product(self).sqrt()
    }

    /// `||v||_inf` over all nodes, boundary included.
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// `max_i |u_i - v_i|` over all nodes.
    pub fn sup_distance(&self, other: &GridFunction) -> f64 {
        self.check_same_grid(other);
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()))
    }

    /// `v^{n-1/2} = (v^n + v^{n-1}) / 2`.
    pub fn half_step_average(prev: &GridFunction, next: &GridFunction) -> GridFunction {
        prev.check_same_grid(next);
        GridFunction {
            grid: prev.grid,
            values: prev
                .values
                .iter()
                .zip(&next.values)
                .map(|(a, b)| 0.5 * (a + b))
                .collect(),
        }
    }

    /// `delta_t v^{n-1/2} = (v^n - v^{n-1}) / tau`.
    pub fn time_diff(prev: &GridFunction, next: &GridFunction, tau: f64) -> GridFunction {
        prev.check_same_grid(next);
        GridFunction {
            grid: prev.grid,
            values: prev
                .values
                .iter()
                .zip(&next.values)
                .map(|(a, b)| (b - a) / tau)
                .collect(),
        }
    }

    /// `a * self + b * other`.
    pub fn linear_combination(&self, a: f64, other: &GridFunction, b: f64) -> GridFunction {
        self.check_same_grid(other);
        GridFunction {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(x, y)| a * x + b * y)
                .collect(),
        }
    }

    pub fn scaled(&self, a: f64) -> GridFunction {
        GridFunction {
            grid: self.grid,
            values: self.values.iter().map(|x| a * x).collect(),
        }
    }

    /// `self += a * other`.
    pub fn axpy(&mut self, a: f64, other: &GridFunction) {
        self.check_same_grid(other);
        for (x, y) in self.values.iter_mut().zip(&other.values) {
            *x += a * y;
        }
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }
}

impl Index<usize> for GridFunction {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.values[i]
    }
}

impl IndexMut<usize> for GridFunction {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.values[i]
    }
}
