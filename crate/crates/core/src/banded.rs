//! Banded matrices and LU factorization with partial pivoting.
//!
//! Storage is row-oriented: row `i` keeps the columns `i - kl ..= i + ku`.
//! The factorization widens each row to `i - kl ..= i + ku + kl` to hold the
//! fill-in created by row interchanges.

use crate::error::{Error, Result};

/// Square matrix with `kl` sub-diagonals and `ku` super-diagonals.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedMatrix {
    dim: usize,
    kl: usize,
    ku: usize,
    data: Vec<f64>,
}

impl BandedMatrix {
    pub fn zeros(dim: usize, kl: usize, ku: usize) -> Self {
        Self {
            dim,
            kl,
            ku,
            data: vec![0.0; dim * (kl + ku + 1)],
        }
    }

    pub fn identity(dim: usize, kl: usize, ku: usize) -> Self {
        let mut a = Self::zeros(dim, kl, ku);
        for i in 0..dim {
            a.set(i, i, 1.0);
        }
        a
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn lower_bandwidth(&self) -> usize {
        self.kl
    }

    pub fn upper_bandwidth(&self) -> usize {
        self.ku
    }

    fn width(&self) -> usize {
        self.kl + self.ku + 1
    }

    /// Whether `(i, j)` lies inside the band.
    pub fn in_band(&self, i: usize, j: usize) -> bool {
        i < self.dim && j < self.dim && j + self.kl >= i && j <= i + self.ku
    }

    fn offset(&self, i: usize, j: usize) -> usize {
        debug_assert!(self.in_band(i, j));
        i * self.width() + (j + self.kl - i)
    }

    /// Entry `(i, j)`; zero outside the band.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if self.in_band(i, j) {
            self.data[self.offset(i, j)]
        } else {
            0.0
        }
    }

    /// Panics when `(i, j)` is outside the band.
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        assert!(self.in_band(i, j), "entry ({i}, {j}) outside the band");
        let o = self.offset(i, j);
        self.data[o] = value;
    }

    pub fn add(&mut self, i: usize, j: usize, value: f64) {
        assert!(self.in_band(i, j), "entry ({i}, {j}) outside the band");
        let o = self.offset(i, j);
        self.data[o] += value;
    }

    /// Columns in the band of row `i`.
    pub fn row_range(&self, i: usize) -> std::ops::Range<usize> {
        i.saturating_sub(self.kl)..(i + self.ku + 1).min(self.dim)
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.dim);
        (0..self.dim)
            .map(|i| self.row_range(i).map(|j| self.get(i, j) * x[j]).sum())
            .collect()
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.dim)
            .map(|i| self.row_range(i).map(|j| self.get(i, j).abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Number of structurally stored entries in row `i` that are nonzero.
    pub fn row_nonzeros(&self, i: usize) -> usize {
        self.row_range(i).filter(|&j| self.get(i, j) != 0.0).count()
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.get(i, j)).collect())
            .collect()
    }

    pub fn factor(&self) -> Result<BandedLu> {
        BandedLu::new(self)
    }
}

/// LU factors of a [`BandedMatrix`] with row interchanges.
#[derive(Debug, Clone)]
pub struct BandedLu {
    dim: usize,
    kl: usize,
    /// Upper bandwidth of `U`, `ku + kl`.
    ku_fill: usize,
    data: Vec<f64>,
    pivots: Vec<usize>,
}

impl BandedLu {
    fn new(a: &BandedMatrix) -> Result<Self> {
        let n = a.dim;
        let kl = a.kl;
        let ku_fill = a.ku + a.kl;
        let width = kl + ku_fill + 1;
        let mut lu = Self {
            dim: n,
            kl,
            ku_fill,
            data: vec![0.0; n * width],
            pivots: vec![0; n],
        };
        for i in 0..n {
            for j in a.row_range(i) {
                let o = lu.offset(i, j);
                lu.data[o] = a.get(i, j);
            }
        }

        for k in 0..n {
            let last_row = (k + kl).min(n - 1);
            let last_col = (k + ku_fill).min(n - 1);

            let mut p = k;
            let mut best = lu.at(k, k).abs();
            for i in k + 1..=last_row {
                let v = lu.at(i, k).abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == 0.0 {
                return Err(Error::SingularPivot { row: k });
            }
            lu.pivots[k] = p;
            if p != k {
                for j in k..=last_col {
                    let (ok, op) = (lu.offset(k, j), lu.offset(p, j));
                    lu.data.swap(ok, op);
                }
            }

            let pivot = lu.at(k, k);
            for i in k + 1..=last_row {
                let oik = lu.offset(i, k);
                let l = lu.data[oik] / pivot;
                lu.data[oik] = l;
                if l != 0.0 {
                    for j in k + 1..=last_col {
                        let ukj = lu.at(k, j);
                        let oij = lu.offset(i, j);
                        lu.data[oij] -= l * ukj;
                    }
                }
            }
        }
        Ok(lu)
    }

    fn width(&self) -> usize {
        self.kl + self.ku_fill + 1
    }

    fn offset(&self, i: usize, j: usize) -> usize {
        debug_assert!(j + self.kl >= i && j <= i + self.ku_fill);
        i * self.width() + (j + self.kl - i)
    }

    fn at(&self, i: usize, j: usize) -> f64 {
        self.data[self.offset(i, j)]
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Solves `A x = rhs`.
    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let mut x = rhs.to_vec();
        self.solve_in_place(&mut x);
        x
    }

    pub fn solve_in_place(&self, x: &mut [f64]) {
        let n = self.dim;
        assert_eq!(x.len(), n, "right-hand side length mismatch");
        for k in 0..n {
            let p = self.pivots[k];
            if p != k {
                x.swap(k, p);
            }
            let xk = x[k];
            if xk != 0.0 {
                for i in k + 1..=(k + self.kl).min(n - 1) {
                    x[i] -= self.at(i, k) * xk;
                }
            }
        }
        for k in (0..n).rev() {
            let mut s = x[k];
            for j in k + 1..=(k + self.ku_fill).min(n - 1) {
                s -= self.at(k, j) * x[j];
            }
            x[k] = s / self.at(k, k);
        }
    }
}
