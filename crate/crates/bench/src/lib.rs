//! Shared inputs for the benchmarks.

use fracburgers::{Grid1D, GridFunction, HistoryBuffer};

/// Smooth Dirichlet grid function on `[0, 1]` with `m` subdivisions.
pub fn smooth(m: usize) -> GridFunction {
    let grid = Grid1D::new(1.0, m).expect("valid grid");
    GridFunction::sample_dirichlet(grid, |x| (std::f64::consts::PI * x).sin() * (1.0 + x))
}

/// History of `len` entries that vary slowly in time.
pub fn history(m: usize, len: usize) -> HistoryBuffer {
    let base = smooth(m);
    let mut h = HistoryBuffer::with_capacity(base.clone(), len);
    for k in 1..len {
        h.push(base.scaled(1.0 + 1e-3 * k as f64));
    }
    h
}
