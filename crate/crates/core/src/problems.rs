//! Benchmark problems on `[0, 1] x [0, 1]`.
//!
//! * `example1`: smooth manufactured solution `u = (t^{2+a} + 1) sin(pi x)`.
//! * `example2`: `u = t^{3/2} sin(2 pi x)` at `a = 1/2`; `u_tt` is singular at `t = 0`.
//! * `example3`: polynomial initial value, no source, no known solution.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::stepper::ProblemSpec;

/// Keys accepted by [`build`].
pub const KEYS: [&str; 3] = ["example1", "example2", "example3"];

/// The order `example2` is defined for.
pub const EXAMPLE2_ALPHA: f64 = 0.5;

/// `Gamma(x)`.
pub fn gamma(x: f64) -> f64 {
    libm::tgamma(x)
}

/// A registered problem: its key and a builder taking `(alpha, mu1, mu2, lambda)`.
#[derive(Clone, Copy)]
pub struct NamedProblem {
    pub key: &'static str,
    pub builder: fn(f64, f64, f64, f64) -> Result<ProblemSpec>,
}

pub fn registry() -> [NamedProblem; 3] {
    [
        NamedProblem {
            key: "example1",
            builder: |a, m1, m2, l| checked(example1(a, m1, m2, l)),
        },
        NamedProblem {
            key: "example2",
            builder: |a, m1, m2, l| {
                if a != EXAMPLE2_ALPHA {
                    return Err(Error::Config(format!(
                        "example2 is defined for alpha = {EXAMPLE2_ALPHA} only, got {a}"
                    )));
                }
                checked(example2(m1, m2, l))
            },
        },
        NamedProblem {
            key: "example3",
            builder: |a, m1, m2, l| checked(example3(a, m1, m2, l)),
        },
    ]
}

fn checked(p: ProblemSpec) -> Result<ProblemSpec> {
    p.validate()?;
    Ok(p)
}

/// Builds a registered problem by key.
pub fn build(key: &str, alpha: f64, mu1: f64, mu2: f64, lambda: f64) -> Result<ProblemSpec> {
    let entry = registry()
        .into_iter()
        .find(|p| p.key == key)
        .ok_or_else(|| {
            Error::Config(format!(
                "unknown problem `{key}` (known: {})",
                KEYS.join(", ")
            ))
        })?;
    (entry.builder)(alpha, mu1, mu2, lambda)
}

pub fn example1(alpha: f64, mu1: f64, mu2: f64, lambda: f64) -> ProblemSpec {
    let g3a = gamma(3.0 + alpha);
    let amp = move |t: f64| t.powf(2.0 + alpha) + 1.0;
    ProblemSpec {
        key: "example1".into(),
        mu1,
        mu2,
        lambda,
        alpha,
        length: 1.0,
        horizon: 1.0,
        phi1: Arc::new(|x| (PI * x).sin()),
        phi2: Arc::new(|_| 0.0),
        source: Arc::new(move |x, t| {
            let s = (PI * x).sin();
            let a = amp(t);
            g3a * t * s * (mu1 + 0.5 * mu2 * t)
                + 0.5 * PI * (2.0 * PI * x).sin() * a * a
                + lambda * PI * PI * s * a
        }),
        exact: Some(Arc::new(move |x, t| amp(t) * (PI * x).sin())),
    }
}

pub fn example2(mu1: f64, mu2: f64, lambda: f64) -> ProblemSpec {
    let c = 0.75 * PI.sqrt();
    ProblemSpec {
        key: "example2".into(),
        mu1,
        mu2,
        lambda,
        alpha: EXAMPLE2_ALPHA,
        length: 1.0,
        horizon: 1.0,
        phi1: Arc::new(|_| 0.0),
        phi2: Arc::new(|_| 0.0),
        source: Arc::new(move |x, t| {
            let s2 = (2.0 * PI * x).sin();
            c * s2 * (mu1 + mu2 * t)
                + PI * t.powi(3) * (4.0 * PI * x).sin()
                + 4.0 * lambda * PI * PI * t.powf(1.5) * s2
        }),
        exact: Some(Arc::new(|x, t| t.powf(1.5) * (2.0 * PI * x).sin())),
    }
}

pub fn example3(alpha: f64, mu1: f64, mu2: f64, lambda: f64) -> ProblemSpec {
    let l = 1.0;
    ProblemSpec {
        key: "example3".into(),
        mu1,
        mu2,
        lambda,
        alpha,
        length: l,
        horizon: 1.0,
        phi1: Arc::new(move |x| x * x * (x - l) * (x - l) * (x * x - l * x + l * l)),
        phi2: Arc::new(|_| 0.0),
        source: Arc::new(|_, _| 0.0),
        exact: None,
    }
}
