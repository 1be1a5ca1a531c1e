//! Exact (erf-based) GELU and its derivative.

use std::f64::consts::{PI, SQRT_2};

/// Standard normal CDF.
#[inline]
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * (1.0 + libm::erf(x / SQRT_2))
}

/// Exact GELU: `x * cdf(x)`. The tanh approximation would perturb the
/// finite-difference gradient checks, so it is deliberately not used.
#[inline]
pub fn gelu(x: f64) -> f64 {
    x * normal_cdf(x)
}

/// Derivative of [`gelu`]: `cdf(x) + x * pdf(x)`.
#[inline]
pub fn gelu_grad(x: f64) -> f64 {
    let pdf = (-0.5 * x * x).exp() / (2.0 * PI).sqrt();
    normal_cdf(x) + x * pdf
}

/// Apply [`gelu`] elementwise.
pub fn gelu_map(values: &mut [f64]) {
    for v in values {
        *v = gelu(*v);
    }
}
