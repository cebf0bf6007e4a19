//! Partial blockage of a highly directional link.
//!
//! A Gaussian beam lands on a circular receive aperture while a round
//! blocker casts a circular shadow on the receive plane. This crate computes
//! the fraction of beam power inside that shadow (the blockage coefficient
//! `I_b`) exactly by adaptive quadrature and through two closed-form
//! approximations, the resulting geometric spread `h_b = I - I_b`, and the
//! closed-form outage probability when the shadow offset is uniformly
//! distributed. Monte Carlo estimators in [`oracles`] cross-check every
//! closed form.
//!
//! ```
//! use blockage::{LinkScenario, approx, exact};
//!
//! let s = LinkScenario::new(2.0, 2.0, 1.0, 1.0).validate().unwrap();
//! let exact = exact::shadow_integral_exact(&s, &Default::default()).unwrap();
//! let square = approx::shadow_integral_theorem1(&s);
//! assert!((exact.value - square.value).abs() < 1e-2);
//! ```

pub mod approx;
pub mod cli;
pub mod error;
pub mod exact;
pub mod geometry;
pub mod oracles;
pub mod outage;
pub mod quadrature;

pub use error::{Error, Result};
pub use geometry::{BlockageResult, LinkScenario, Method, Scenario};

/// Error function used throughout the crate.
#[inline]
pub(crate) fn erf(x: f64) -> f64 {
    libm::erf(x)
}
