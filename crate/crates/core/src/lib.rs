//! Fourth-order compact difference solver for the mixed-type time-fractional
//! Burgers equation
//!
//! ```text
//! mu1 D^{alpha+1} u + mu2 D^alpha u + u u_x = lambda u_xx + f,   0 < alpha < 1,
//! ```
//!
//! with Caputo derivatives discretized by the L1 formula, the convection term
//! by a skew-symmetric compact operator and `u_xx` by the classical compact
//! relation `(I + h^2/12 delta_x^2) w = delta_x^2 u`.

#![allow(clippy::needless_range_loop)]

pub mod analysis;
pub mod banded;
pub mod compact;
pub mod error;
pub mod fractional;
pub mod mesh;
pub mod problems;
pub mod report;
pub mod stepper;

pub use analysis::{ConvergenceReport, Metric, StudyOptions};
pub use error::{Error, Result};
pub use fractional::{HistoryBuffer, L1Weights};
pub use mesh::{Grid1D, GridFunction, TimeMesh};
pub use stepper::{solve, IterationCoefficients, ProblemSpec, SolveResult, Solver, SolverConfig};
