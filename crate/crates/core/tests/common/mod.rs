//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use quadrature::double_exponential;

/// `int_a^b f` by tanh-sinh quadrature (never samples the endpoints).
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, abs_tol: f64) -> f64 {
    double_exponential::integrate(f, a, b, abs_tol).integral
}

/// `int_a^b s^{-k} g(s) ds` for smooth `g`, `k < 1`, `0 <= a`. Substitutes
/// `s = r^q` with `q = 2/(1-k)`, giving the smooth integrand
/// `q r g(r^q)`.
pub fn integrate_singular_at_zero(g: impl Fn(f64) -> f64, k: f64, a: f64, b: f64) -> f64 {
    let q = 2.0 / (1.0 - k);
    let (ra, rb) = (a.powf(1.0 / q), b.powf(1.0 / q));
    integrate(|r| q * r * g(r.powf(q)), ra, rb, 1e-15)
}

/// Caputo derivative of order `a` in (0,1) at `t`, given the first derivative
/// `dg` of the function:
/// `1/Gamma(1-a) int_0^t dg(s) (t-s)^{-a} ds`.
///
/// The integral is split at `t/2`. The left half substitutes `s = r^2` so an
/// `s^{-1/2}` singularity of `dg` at zero becomes bounded; the right half
/// substitutes `t - s = v^{1/(1-a)}`, which removes the kernel singularity.
pub fn caputo(dg: impl Fn(f64) -> f64, t: f64, a: f64) -> f64 {
    if t == 0.0 {
        return 0.0;
    }
    let half = 0.5 * t;
    let left = integrate(
        |r| dg(r * r) * (t - r * r).powf(-a) * 2.0 * r,
        0.0,
        half.sqrt(),
        1e-15,
    );
    let p = 1.0 / (1.0 - a);
    let right = p * integrate(|v| dg(t - v.powf(p)), 0.0, half.powf(1.0 - a), 1e-15);
    (left + right) / libm::tgamma(1.0 - a)
}

/// Deterministic RNG for hand-rolled randomized checks.
pub fn rng(seed: u64) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    rand_chacha::ChaCha8Rng::seed_from_u64(seed)
}
