//! The nonlinear compact convection operator `psi`, the compact averaging
//! operator `H = I + (h^2/12) delta_x^2`, and recovery of `w ~ u_xx` from
//! `H w = delta_x^2 u`.
//!
//! `psi(u, v)_i = (1/3) [u_i Delta_x v_i + Delta_x (u v)_i]` is bilinear but not
//! symmetric, and satisfies `<psi(u, v), v> = 0` for any `v` vanishing on the
//! boundary. Its value on boundary nodes is defined as zero.

use crate::banded::{BandedLu, BandedMatrix};
use crate::error::Result;
use crate::mesh::{Grid1D, GridFunction};

/// `psi(u, v)` at interior nodes, zero on the boundary.
pub fn psi_apply(u: &GridFunction, v: &GridFunction) -> GridFunction {
    assert_eq!(u.grid(), v.grid(), "psi arguments live on different grids");
    let grid = *u.grid();
    let m = grid.subdivisions();
    let c = 1.0 / (6.0 * grid.step());
    let (u, v) = (u.values(), v.values());
    let mut out = GridFunction::zeros(grid);
    for i in 1..m {
        out[i] = c * (u[i] * (v[i + 1] - v[i - 1]) + u[i + 1] * v[i + 1] - u[i - 1] * v[i - 1]);
    }
    out
}

/// A three-point linear stencil: row `i` holds the multipliers of
/// `(v_{i-1}, v_i, v_{i+1})`. Rows `0` and `M` are zero.
///
/// Produced by freezing one argument of `psi`; since `psi` is bilinear these
/// linearizations are exact.
#[derive(Debug, Clone, PartialEq)]
pub struct PsiCoefficients {
    grid: Grid1D,
    rows: Vec<[f64; 3]>,
}

impl PsiCoefficients {
    pub fn zeros(grid: Grid1D) -> Self {
        Self {
            grid,
            rows: vec![[0.0; 3]; grid.len()],
        }
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn row(&self, i: usize) -> [f64; 3] {
        self.rows[i]
    }

    pub fn rows(&self) -> &[[f64; 3]] {
        &self.rows
    }

    pub fn apply(&self, v: &GridFunction) -> GridFunction {
        assert_eq!(
            *v.grid(),
            self.grid,
            "stencil and grid function on different grids"
        );
        let m = self.grid.subdivisions();
        let x = v.values();
        let mut out = GridFunction::zeros(self.grid);
        for i in 1..m {
            let [a, b, c] = self.rows[i];
            out[i] = a * x[i - 1] + b * x[i] + c * x[i + 1];
        }
        out
    }

    /// `self += s * other`.
    pub fn add_scaled(&mut self, s: f64, other: &PsiCoefficients) {
        assert_eq!(self.grid, other.grid);
        for (r, o) in self.rows.iter_mut().zip(&other.rows) {
            for k in 0..3 {
                r[k] += s * o[k];
            }
        }
    }

    /// Adds `c` to the diagonal of every interior row.
    pub fn add_diagonal(&mut self, c: f64) {
        let m = self.grid.subdivisions();
        for r in &mut self.rows[1..m] {
            r[1] += c;
        }
    }
}

/// Coefficients of `v -> psi(u, v)` for frozen `u`.
pub fn psi_linearized_in_second(u: &GridFunction) -> PsiCoefficients {
    let grid = *u.grid();
    let c = 1.0 / (6.0 * grid.step());
    let u = u.values();
    let mut out = PsiCoefficients::zeros(grid);
    for i in 1..grid.subdivisions() {
        out.rows[i] = [-c * (u[i] + u[i - 1]), 0.0, c * (u[i] + u[i + 1])];
    }
    out
}

/// Coefficients of `u -> psi(u, v)` for frozen `v`.
pub fn psi_linearized_in_first(v: &GridFunction) -> PsiCoefficients {
    let grid = *v.grid();
    let c = 1.0 / (6.0 * grid.step());
    let v = v.values();
    let mut out = PsiCoefficients::zeros(grid);
    for i in 1..grid.subdivisions() {
        out.rows[i] = [-c * v[i - 1], c * (v[i + 1] - v[i - 1]), c * v[i + 1]];
    }
    out
}

/// `v -> (u_{i-1} + u_i + u_{i+1}) / (6h) * (v_{i+1} - v_{i-1})`.
///
/// Applied to `v = u` this reproduces `psi(u, u)`; the fixed-point iteration
/// freezes the triple sum at the previous iterate.
pub fn psi_semi_implicit_diag(u_lagged: &GridFunction) -> PsiCoefficients {
    let grid = *u_lagged.grid();
    let c = 1.0 / (6.0 * grid.step());
    let u = u_lagged.values();
    let mut out = PsiCoefficients::zeros(grid);
    for i in 1..grid.subdivisions() {
        let s = c * (u[i - 1] + u[i] + u[i + 1]);
        out.rows[i] = [-s, 0.0, s];
    }
    out
}

/// `(H v)_i = (v_{i-1} + 10 v_i + v_{i+1}) / 12` at interior nodes, zero on the boundary.
pub fn compact_average_apply(v: &GridFunction) -> GridFunction {
    let grid = *v.grid();
    let x = v.values();
    let mut out = GridFunction::zeros(grid);
    for i in 1..grid.subdivisions() {
        out[i] = (x[i - 1] + 10.0 * x[i] + x[i + 1]) / 12.0;
    }
    out
}

/// `H` restricted to interior nodes as an `(M-1) x (M-1)` tridiagonal matrix.
pub fn compact_average_matrix(grid: &Grid1D) -> BandedMatrix {
    let n = grid.subdivisions() - 1;
    let mut a = BandedMatrix::zeros(n, 1, 1);
    for r in 0..n {
        a.set(r, r, 10.0 / 12.0);
        if r > 0 {
            a.set(r, r - 1, 1.0 / 12.0);
        }
        if r + 1 < n {
            a.set(r, r + 1, 1.0 / 12.0);
        }
    }
    a
}

/// Factored interior `H`, reused for every `w` recovery on one grid.
#[derive(Debug, Clone)]
pub struct CompactAverage {
    grid: Grid1D,
    lu: BandedLu,
}

impl CompactAverage {
    pub fn new(grid: Grid1D) -> Result<Self> {
        let lu = compact_average_matrix(&grid).factor()?;
        Ok(Self { grid, lu })
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    /// Solves `H w = delta_x^2 u`, `w_0 = w_M = 0`.
    pub fn recover_w(&self, u: &GridFunction) -> GridFunction {
        assert_eq!(*u.grid(), self.grid);
        let mut w = u.second_diff_all();
        self.lu.solve_in_place(w.interior_mut());
        w
    }

    /// Solves `H x = rhs` on interior nodes, zero boundary.
    pub fn solve(&self, rhs: &GridFunction) -> GridFunction {
        assert_eq!(*rhs.grid(), self.grid);
        let mut x = rhs.clone();
        x.clear_boundary();
        self.lu.solve_in_place(x.interior_mut());
        x
    }
}

/// One-off `w` recovery; see [`CompactAverage::recover_w`].
pub fn recover_w(u: &GridFunction) -> Result<GridFunction> {
    Ok(CompactAverage::new(*u.grid())?.recover_w(u))
}

/// `H T` on interior nodes, where `T` is a three-point stencil whose output is
/// treated as zero on the boundary. The product is pentadiagonal.
pub fn compose_average(stencil: &PsiCoefficients) -> BandedMatrix {
    let grid = stencil.grid();
    let m = grid.subdivisions();
    let n = m - 1;
    let mut a = BandedMatrix::zeros(n, 2, 2);
    const H: [f64; 3] = [1.0 / 12.0, 10.0 / 12.0, 1.0 / 12.0];
    // row r <-> node r + 1
    for r in 0..n {
        let i = r + 1;
        for (dk, hw) in H.iter().enumerate() {
            let k = i + dk - 1;
            if k == 0 || k == m {
                continue;
            }
            let t = stencil.rows[k];
            for (dj, tw) in t.iter().enumerate() {
                let j = k + dj - 1;
                if j == 0 || j == m || *tw == 0.0 {
                    continue;
                }
                a.add(r, j - 1, hw * tw);
            }
        }
    }
    a
}
