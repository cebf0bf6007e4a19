//! Exact evaluation of collected and shadowed beam power.

use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

use crate::error::Result;
use crate::geometry::{clamp_unit, BlockageResult, Method, Scenario};
use crate::quadrature::integrate;
pub use crate::quadrature::QuadratureConfig;

/// `erf(sqrt(2) * alpha / w_d)^2`: beam power over the square `[-alpha, alpha]^2`.
pub fn collected_fraction(alpha: f64, w_d: f64) -> f64 {
    let e = crate::erf(SQRT_2 * alpha / w_d);
    e * e
}

/// Fraction `I` of beam power collected by the unblocked aperture.
pub fn collected_fraction_unblocked(s: &Scenario) -> f64 {
    collected_fraction(s.alpha(), s.w_d())
}

/// Beam power falling inside the shadow disk, by adaptive quadrature.
///
/// The inner `y` integral over each chord of the disk has the closed form
/// `sqrt(pi/2) w_d erf(sqrt(2) zeta / w_d)`, leaving a one-dimensional
/// integral in `x`. The chord half-length `zeta = sqrt(alpha_b^2 - x^2)` has
/// square-root endpoints, so the integral is taken in `x = alpha_b sin(t)`
/// where the integrand is smooth.
pub fn shadow_integral_exact(s: &Scenario, q: &QuadratureConfig) -> Result<BlockageResult> {
    q.check()?;
    let (w, ab, r) = (s.w_d(), s.alpha_b(), s.r());
    if ab == 0.0 {
        return Ok(BlockageResult {
            value: 0.0,
            method: Method::ExactQuadrature,
            error_estimate: 0.0,
            unclamped: 0.0,
        });
    }

    let scale = (2.0 / PI).sqrt() / w;
    let integrand = |t: f64| {
        let (sin, cos) = t.sin_cos();
        let x = ab * sin;
        let zeta = ab * cos.max(0.0);
        let d = x - r;
        scale * (-2.0 * d * d / (w * w)).exp() * crate::erf(SQRT_2 * zeta / w) * zeta
    };
    let integral = integrate(integrand, -FRAC_PI_2, FRAC_PI_2, q)?;
    Ok(BlockageResult {
        value: clamp_unit(integral.value)?,
        method: Method::ExactQuadrature,
        error_estimate: integral.abs_error,
        unclamped: integral.value,
    })
}
