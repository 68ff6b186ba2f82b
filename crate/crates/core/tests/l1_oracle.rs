//! L1 weights and memory sums against quadrature of the Caputo integral.

mod common;

use common::{caputo, integrate_singular_at_zero, rng};
use fracburgers::fractional::{l1_explicit_part, l1_memory_sum};
use fracburgers::{Grid1D, GridFunction, HistoryBuffer, L1Weights};
use rand::Rng;

const ALPHAS: [f64; 6] = [0.05, 0.25, 0.5, 0.75, 0.85, 0.99];

#[test]
fn oracle_matches_closed_form_caputo_of_powers() {
    // D^a t^p = Gamma(p+1)/Gamma(p+1-a) t^{p-a}
    for &a in &[0.25, 0.5, 0.75] {
        for &p in &[1.5, 2.0, 3.0] {
            let t: f64 = 0.7;
            let exact = libm::tgamma(p + 1.0) / libm::tgamma(p + 1.0 - a) * t.powf(p - a);
            let q = caputo(|s| p * s.powf(p - 1.0), t, a);
            assert!((q - exact).abs() < 1e-12, "a={a} p={p}: {q} vs {exact}");
        }
    }
}

#[test]
fn weights_match_quadrature() {
    for &a in &ALPHAS {
        for &tau in &[1.0, 0.1, 1.0 / 64.0] {
            let w = L1Weights::new(a, tau, 40).unwrap();
            for i in 0..40 {
                let (lo, hi) = (i as f64 * tau, (i + 1) as f64 * tau);
                let q = integrate_singular_at_zero(|_| 1.0, a, lo, hi);
                assert!((w.get(i) - q).abs() <= 1e-10, "a={a} tau={tau} i={i}");
            }
        }
    }
    let w = L1Weights::new(0.5, 1.0, 2).unwrap();
    let q0 = integrate_singular_at_zero(|_| 1.0, 0.5, 0.0, 1.0);
    let q1 = integrate_singular_at_zero(|_| 1.0, 0.5, 1.0, 2.0);
    assert!((w.get(0) - 2.0).abs() < 1e-12 && (q0 - 2.0).abs() < 1e-10);
    assert!((w.get(1) - 0.8284271).abs() < 1e-7 && (q1 - w.get(1)).abs() < 1e-10);
    assert_eq!(w.implicit_coefficient(), w.get(0));
}

#[test]
fn weights_positive_and_strictly_decreasing() {
    for &a in &ALPHAS {
        let w = L1Weights::new(a, 1e-3, 10_000).unwrap();
        let b = w.as_slice();
        assert!(b[9_999] > 0.0);
        assert!(b.windows(2).all(|p| p[0] > p[1]), "a={a}");
    }
}

fn constant_history(grid: Grid1D, c: f64, len: usize) -> HistoryBuffer {
    let g = GridFunction::sample_dirichlet(grid, |x| c * (1.0 + x));
    let mut h = HistoryBuffer::new(g.clone());
    for _ in 1..len {
        h.push(g.clone());
    }
    h
}

#[test]
fn memory_of_constant_sequence_vanishes() {
    let grid = Grid1D::new(1.0, 8).unwrap();
    for &a in &ALPHAS {
        let w = L1Weights::new(a, 1.0 / 500.0, 500).unwrap();
        let h = constant_history(grid, 2.5, 501);
        let g0 = h.get(0).sup_norm();
        for n in [1, 2, 17, 250, 500] {
            assert!(
                l1_memory_sum(&w, &h, n).sup_norm() <= 1e-13 * g0,
                "a={a} n={n}"
            );
        }
    }
}

/// Direct evaluation of the memory sum at one node, term by term.
fn naive_memory(b: &[f64], g: &[f64], n: usize) -> (f64, f64) {
    let mut s = b[0] * g[n] - b[n - 1] * g[0];
    let mut mag = (b[0] * g[n]).abs() + (b[n - 1] * g[0]).abs();
    for j in 1..n {
        let t = (b[n - j - 1] - b[n - j]) * g[j];
        s -= t;
        mag += t.abs();
    }
    (s, mag)
}

#[test]
fn split_reassembles_memory_sum() {
    let grid = Grid1D::new(1.0, 6).unwrap();
    let mut r = rng(11);
    for &a in &[0.25, 0.5, 0.85] {
        let n_max = 60;
        let w = L1Weights::new(a, 1.0 / n_max as f64, n_max).unwrap();
        let rand_fn = |r: &mut rand_chacha::ChaCha8Rng| {
            let mut v = GridFunction::zeros(grid);
            for x in v.interior_mut() {
                *x = r.gen_range(-1.0..1.0);
            }
            v
        };
        let mut h = HistoryBuffer::new(rand_fn(&mut r));
        for _ in 0..n_max {
            h.push(rand_fn(&mut r));
        }
        for n in 1..=n_max {
            let full = l1_memory_sum(&w, &h, n);
            let mut split = l1_explicit_part(&w, &h, n);
            split.axpy(w.implicit_coefficient(), h.get(n));
            assert!(split.is_dirichlet());
            for i in 0..=6 {
                let ulp = 2.0 * f64::EPSILON * full[i].abs().max(f64::MIN_POSITIVE);
                assert!((full[i] - split[i]).abs() <= ulp, "n={n} i={i}");
                let seq: Vec<f64> = h.entries().iter().map(|g| g[i]).collect();
                let (direct, mag) = naive_memory(w.as_slice(), &seq, n);
                assert!((full[i] - direct).abs() <= 4.0 * n as f64 * f64::EPSILON * mag);
            }
        }
    }
}

/// `max_n |tau^{-1}/Gamma(1-a) D(G)^n - D^a G(t_n)|` on `[0, 1]`.
fn l1_error(a: f64, steps: usize, g: impl Fn(f64) -> f64, dg: impl Fn(f64) -> f64) -> f64 {
    let tau = 1.0 / steps as f64;
    let grid = Grid1D::new(1.0, 2).unwrap();
    let w = L1Weights::new(a, tau, steps).unwrap();
    let sample = |t: f64| GridFunction::from_values(grid, vec![0.0, g(t), 0.0]);
    let mut h = HistoryBuffer::new(sample(0.0));
    for n in 1..=steps {
        h.push(sample(n as f64 * tau));
    }
    let scale = 1.0 / (tau * libm::tgamma(1.0 - a));
    (1..=steps)
        .map(|n| {
            let t = n as f64 * tau;
            (scale * l1_memory_sum(&w, &h, n)[1] - caputo(&dg, t, a)).abs()
        })
        .fold(0.0, f64::max)
}

#[test]
fn halving_step_on_quadratic_gains_two_minus_alpha() {
    for &a in &[0.25, 0.5, 0.75] {
        let e1 = l1_error(a, 32, |t| t * t, |t| 2.0 * t);
        let e2 = l1_error(a, 64, |t| t * t, |t| 2.0 * t);
        let order = (e1 / e2).log2();
        assert!((order - (2.0 - a)).abs() < 0.15, "a={a}: order {order}");
        assert!(e2 < 64f64.powf(a - 2.0) * 2.0);
    }
}

#[test]
fn truncation_order_on_cubic() {
    for &a in &[0.25, 0.5, 0.75] {
        let errs: Vec<f64> = [32, 64, 128, 256]
            .iter()
            .map(|&n| l1_error(a, n, |t| t.powi(3), |t| 3.0 * t * t))
            .collect();
        for k in 1..errs.len() {
            let order = (errs[k - 1] / errs[k]).log2();
            assert!(
                (order - (2.0 - a)).abs() < 0.15,
                "a={a}: order {order} at step {k}"
            );
        }
    }
}
