//! L1 discretization of the Caputo derivative.
//!
//! For a sequence `G^0, G^1, ..., G^n` on the uniform time mesh the memory
//! operator is
//!
//! ```text
//! D(G)^n = b_0 G^n - sum_{j=1}^{n-1} (b_{n-j-1} - b_{n-j}) G^j - b_{n-1} G^0
//! ```
//!
//! with `b_i = tau^{1-a} / (1-a) * ((i+1)^{1-a} - i^{1-a})`, so that
//! `tau^{-1} / Gamma(1-a) * D(G)^n` approximates the Caputo derivative of
//! order `a` at `t_n` with error `O(tau^{2-a})`.

use crate::error::{Error, Result};
use crate::mesh::{Grid1D, GridFunction};

/// The L1 weights `b_0 > b_1 > ... > 0` for a fixed order and time step.
#[derive(Debug, Clone, PartialEq)]
pub struct L1Weights {
    alpha: f64,
    tau: f64,
    weights: Vec<f64>,
}

impl L1Weights {
    pub fn new(alpha: f64, tau: f64, count: usize) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::domain(
                "alpha",
                format!("must lie in (0, 1), got {alpha}"),
            ));
        }
        if !(tau.is_finite() && tau > 0.0) {
            return Err(Error::domain("tau", format!("must be positive, got {tau}")));
        }
        if count == 0 {
            return Err(Error::domain("count", "need at least one weight"));
        }
        let mut w = Self {
            alpha,
            tau,
            weights: Vec::with_capacity(count),
        };
        w.ensure(count);
        Ok(w)
    }

    /// Extends the table to at least `count` weights.
    pub fn ensure(&mut self, count: usize) {
        let beta = 1.0 - self.alpha;
        let scale = self.tau.powf(beta) / beta;
        for i in self.weights.len()..count {
            let i = i as f64;
            self.weights
                .push(scale * ((i + 1.0).powf(beta) - i.powf(beta)));
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.weights
    }

    /// `b_i`.
    pub fn get(&self, i: usize) -> f64 {
        self.weights[i]
    }

    /// Coefficient of the current value `G^n` in the memory sum, `b_0`.
    pub fn implicit_coefficient(&self) -> f64 {
        self.weights[0]
    }
}

/// Stored mixed values `g^0, g^1, ...` feeding the memory sum.
///
/// Entry 0 is the initial mixed value `mu1 * phi2 + mu2 * phi1`; entry `j >= 1`
/// is `mu1 * delta_t u^{j-1/2} + mu2 * u^{j-1/2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct HistoryBuffer {
    grid: Grid1D,
    entries: Vec<GridFunction>,
}

impl HistoryBuffer {
    pub fn new(initial: GridFunction) -> Self {
        Self {
            grid: *initial.grid(),
            entries: vec![initial],
        }
    }

    pub fn with_capacity(initial: GridFunction, capacity: usize) -> Self {
        let mut entries = Vec::with_capacity(capacity.max(1));
        let grid = *initial.grid();
        entries.push(initial);
        Self { grid, entries }
    }

    pub fn push(&mut self, g: GridFunction) {
        assert_eq!(*g.grid(), self.grid, "history entry on a different grid");
        self.entries.push(g);
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, j: usize) -> &GridFunction {
        &self.entries[j]
    }

    pub fn entries(&self) -> &[GridFunction] {
        &self.entries
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }
}

/// Full memory sum `D(g)^n`; needs history entries `0..=n`.
pub fn l1_memory_sum(weights: &L1Weights, history: &HistoryBuffer, n: usize) -> GridFunction {
    assert!(n >= 1, "memory sum needs n >= 1");
    assert!(
        history.len() > n,
        "history holds {} entries, need {}",
        history.len(),
        n + 1
    );
    let mut out = l1_explicit_part(weights, history, n);
    out.axpy(weights.implicit_coefficient(), history.get(n));
    out
}

/// Part of `D(g)^n` that does not involve `g^n`:
/// `- sum_{j=1}^{n-1} (b_{n-j-1} - b_{n-j}) g^j - b_{n-1} g^0`.
///
/// Needs history entries `0..n`.
pub fn l1_explicit_part(weights: &L1Weights, history: &HistoryBuffer, n: usize) -> GridFunction {
    assert!(n >= 1, "memory sum needs n >= 1");
    assert!(
        history.len() >= n,
        "history holds {} entries, need {}",
        history.len(),
        n
    );
    assert!(
        weights.len() >= n,
        "weights hold {} entries, need {}",
        weights.len(),
        n
    );
    let b = weights.as_slice();
    let mut out = history.get(0).scaled(-b[n - 1]);
    let acc = out.values_mut();
    for j in 1..n {
        let c = b[n - j - 1] - b[n - j];
        for (a, g) in acc.iter_mut().zip(history.get(j).values()) {
            *a -= c * g;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_values() {
        let w = L1Weights::new(0.5, 1.0, 4).unwrap();
        assert!((w.get(0) - 2.0).abs() < 1e-15);
        assert!((w.get(1) - 2.0 * (2f64.sqrt() - 1.0)).abs() < 1e-15);
        assert_eq!(w.implicit_coefficient(), w.get(0));
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(L1Weights::new(0.0, 1.0, 3).is_err());
        assert!(L1Weights::new(1.0, 1.0, 3).is_err());
        assert!(L1Weights::new(0.5, 0.0, 3).is_err());
        assert!(L1Weights::new(0.5, 0.1, 0).is_err());
    }

    #[test]
    fn first_weight_is_exact_prefactor() {
        for &a in &[0.1, 0.5, 0.9] {
            let tau = 0.013;
            let w = L1Weights::new(a, tau, 1).unwrap();
            assert_eq!(w.get(0), tau.powf(1.0 - a) / (1.0 - a));
        }
    }

    #[test]
    fn ensure_extends_consistently() {
        let mut a = L1Weights::new(0.3, 0.1, 5).unwrap();
        a.ensure(20);
        let b = L1Weights::new(0.3, 0.1, 20).unwrap();
        assert_eq!(a, b);
        assert!(a.get(9) < a.get(0));
    }

    fn history_of(values: &[f64], grid: Grid1D) -> HistoryBuffer {
        let mut h = HistoryBuffer::new(GridFunction::sample_dirichlet(grid, |_| values[0]));
        for &v in &values[1..] {
            h.push(GridFunction::sample_dirichlet(grid, |_| v));
        }
        h
    }

    #[test]
    fn n_equal_one_is_single_difference() {
        let grid = Grid1D::new(1.0, 4).unwrap();
        let w = L1Weights::new(0.4, 0.1, 2).unwrap();
        let h = history_of(&[1.5, 4.0], grid);
        let d = l1_memory_sum(&w, &h, 1);
        assert!((d[2] - w.get(0) * 2.5).abs() < 1e-14);
        let e = l1_explicit_part(&w, &h, 1);
        assert!((e[2] + w.get(0) * 1.5).abs() < 1e-15);
    }

    #[test]
    fn constant_sequence_has_zero_memory() {
        let grid = Grid1D::new(1.0, 4).unwrap();
        let w = L1Weights::new(0.7, 0.01, 50).unwrap();
        let h = history_of(&[3.0; 50], grid);
        for n in 1..50 {
            assert!(l1_memory_sum(&w, &h, n).sup_norm() <= 1e-13 * 3.0);
        }
    }

    #[test]
    #[should_panic]
    fn short_history_is_contract_violation() {
        let grid = Grid1D::new(1.0, 4).unwrap();
        let w = L1Weights::new(0.7, 0.01, 10).unwrap();
        let h = history_of(&[1.0, 2.0], grid);
        l1_memory_sum(&w, &h, 3);
    }
}
