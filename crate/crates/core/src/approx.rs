//! Closed-form approximations of the shadow integral and of `h_b`.
//!
//! The square approximation ([`shadow_integral_theorem1`]) replaces the
//! shadow disk by a square of equal area, side `sqrt(pi) alpha_b`, which
//! separates into a product of error functions. The Gaussian approximation
//! ([`shadow_integral_theorem2`]) keeps the square's value and curvature at
//! `r = 0`: `I_b ~ C0 exp(-k r^2)`.

use std::f64::consts::{FRAC_PI_2, SQRT_2};

use serde::Serialize;

use crate::erf;
use crate::error::{Error, Result};
use crate::exact::{collected_fraction_unblocked, shadow_integral_exact, QuadratureConfig};
use crate::geometry::{BlockageResult, Method, Scenario};

/// Coefficients of the Gaussian approximation `C0 exp(-decay_rate r^2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Theorem2Coefficients {
    /// `erf(sqrt(pi/2) alpha_b / w_d)^2`, the blockage at `r = 0`.
    pub c0: f64,
    /// Second-order coefficient in the variable `sqrt(2) r / w_d`; never positive.
    pub c2: f64,
    /// `(2 / w_d^2) |C2| / C0`, in 1/m^2.
    pub decay_rate: f64,
}

fn raw_coefficients(w: f64, ab: f64) -> Theorem2Coefficients {
    let z = FRAC_PI_2.sqrt() * ab / w;
    let e = erf(z);
    let c0 = e * e;
    let c2 = -SQRT_2 * (ab / w) * e * (-z * z).exp();
    let decay_rate = if c0 > 0.0 { 2.0 / (w * w) * c2.abs() / c0 } else { 0.0 };
    Theorem2Coefficients { c0, c2, decay_rate }
}

/// Coefficients of the Gaussian approximation.
///
/// Fails for `alpha_b = 0`, and when the decay rate underflows to zero
/// (shadow many beam widths wide).
pub fn theorem2_coefficients(s: &Scenario) -> Result<Theorem2Coefficients> {
    if s.alpha_b() == 0.0 {
        return Err(Error::domain(
            "alpha_b",
            "must be positive for the Gaussian approximation coefficients",
        ));
    }
    let c = raw_coefficients(s.w_d(), s.alpha_b());
    if !(c.decay_rate > 0.0 && c.decay_rate.is_finite()) {
        return Err(Error::domain(
            "alpha_b",
            format!("decay rate underflows for alpha_b / w_d = {}", s.alpha_b() / s.w_d()),
        ));
    }
    Ok(c)
}

/// Square equal-area approximation of the shadow integral.
pub fn shadow_integral_theorem1(s: &Scenario) -> BlockageResult {
    let (w, ab, r) = (s.w_d(), s.alpha_b(), s.r());
    // half side sqrt(pi) ab / 2 over w / sqrt(2); same z as the coefficients
    // so that r = 0 reproduces C0 bit for bit
    let z = FRAC_PI_2.sqrt() * ab / w;
    let shift = SQRT_2 * r / w;
    let raw = 0.5 * erf(z) * (erf(z - shift) + erf(z + shift));
    BlockageResult::closed_form(raw, Method::Theorem1)
}

/// Gaussian approximation `C0 exp(-k r^2)` of the shadow integral.
pub fn shadow_integral_theorem2(s: &Scenario) -> BlockageResult {
    if s.alpha_b() == 0.0 {
        return BlockageResult::closed_form(0.0, Method::Theorem2);
    }
    let c = raw_coefficients(s.w_d(), s.alpha_b());
    let raw = c.c0 * (-c.decay_rate * s.r() * s.r()).exp();
    BlockageResult::closed_form(raw, Method::Theorem2)
}

fn spread(s: &Scenario, shadow: BlockageResult) -> BlockageResult {
    let raw = collected_fraction_unblocked(s) - shadow.value;
    // Negative values mean the shadow integral exceeds what the aperture
    // collects; the collected power saturates at zero.
    BlockageResult {
        value: raw.clamp(0.0, 1.0),
        method: shadow.method,
        error_estimate: shadow.error_estimate,
        unclamped: raw,
    }
}

/// `h_b = I - I_b` with the square approximation.
pub fn hb_theorem1(s: &Scenario) -> BlockageResult {
    spread(s, shadow_integral_theorem1(s))
}

/// `h_b = I - C0 exp(-k r^2)`.
pub fn hb_theorem2(s: &Scenario) -> BlockageResult {
    spread(s, shadow_integral_theorem2(s))
}

/// `h_b = I - I_b` with the quadrature shadow integral.
pub fn hb_exact(s: &Scenario, q: &QuadratureConfig) -> Result<BlockageResult> {
    Ok(spread(s, shadow_integral_exact(s, q)?))
}

/// Deterministic ways of evaluating `h_b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HbMethod {
    Exact(QuadratureConfig),
    Theorem1,
    Theorem2,
}

impl HbMethod {
    pub fn method(&self) -> Method {
        match self {
            HbMethod::Exact(_) => Method::ExactQuadrature,
            HbMethod::Theorem1 => Method::Theorem1,
            HbMethod::Theorem2 => Method::Theorem2,
        }
    }

    /// Maps a [`Method`] tag; Monte Carlo has no deterministic counterpart.
    pub fn from_method(m: Method, q: QuadratureConfig) -> Result<Self> {
        match m {
            Method::ExactQuadrature => Ok(HbMethod::Exact(q)),
            Method::Theorem1 => Ok(HbMethod::Theorem1),
            Method::Theorem2 => Ok(HbMethod::Theorem2),
            Method::MonteCarlo => Err(Error::domain("method", "monte-carlo is not a deterministic h_b method")),
        }
    }
}

pub fn shadow_integral(s: &Scenario, m: &HbMethod) -> Result<BlockageResult> {
    match m {
        HbMethod::Exact(q) => shadow_integral_exact(s, q),
        HbMethod::Theorem1 => Ok(shadow_integral_theorem1(s)),
        HbMethod::Theorem2 => Ok(shadow_integral_theorem2(s)),
    }
}

pub fn hb(s: &Scenario, m: &HbMethod) -> Result<BlockageResult> {
    Ok(spread(s, shadow_integral(s, m)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SupportSource {
    /// The closed-form upper bound. Its logarithm argument `C0 / (I - 1)` is
    /// negative for every valid scenario, so [`support_bounds`] never
    /// produces this source.
    ClosedForm,
    /// `alpha + alpha_b`, beyond which the shadow misses the aperture.
    RelevanceBound,
    User,
}

/// Support `[a1_eff, a2_eff]` of the uniform shadow-offset distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UniformSupport {
    pub a1_eff: f64,
    pub a2_eff: f64,
    /// The lower bound formula had a nonpositive logarithm and was replaced by 0.
    pub a1_clamped: bool,
    pub a2_source: SupportSource,
}

impl UniformSupport {
    /// A support given directly, without reference to a scenario.
    pub fn new(a1_eff: f64, a2_eff: f64) -> Result<Self> {
        let s = Self {
            a1_eff,
            a2_eff,
            a1_clamped: false,
            a2_source: SupportSource::User,
        };
        s.check()?;
        Ok(s)
    }

    pub fn width(&self) -> f64 {
        self.a2_eff - self.a1_eff
    }

    pub(crate) fn check(&self) -> Result<()> {
        if !(self.a1_eff.is_finite() && self.a1_eff >= 0.0) {
            return Err(Error::domain(
                "a1",
                format!("must be finite and nonnegative, got {}", self.a1_eff),
            ));
        }
        if !(self.a2_eff.is_finite() && self.a2_eff > self.a1_eff) {
            return Err(Error::domain(
                "a2",
                format!("must exceed a1 = {}, got {}", self.a1_eff, self.a2_eff),
            ));
        }
        Ok(())
    }
}

/// Offsets over which the Gaussian-approximation `h_b` stays in [0, 1].
///
/// The lower bound is the offset where `h_b` crosses zero, present only when
/// `C0 > I`. The upper bound is `user_a2` when given, and otherwise the
/// relevance limit `alpha + alpha_b` beyond which the shadow misses the aperture.
pub fn support_bounds(s: &Scenario, user_a2: Option<f64>) -> Result<UniformSupport> {
    let c = theorem2_coefficients(s)?;
    let i = collected_fraction_unblocked(s);
    let (a1_eff, a1_clamped) = if c.c0 > i {
        let a1 = s.w_d() / SQRT_2 * (c.c0 / c.c2.abs()).sqrt() * (c.c0 / i).ln().sqrt();
        (a1, false)
    } else {
        (0.0, true)
    };
    let (a2_eff, a2_source) = match user_a2 {
        Some(a2) => {
            if !(a2.is_finite() && a2 > 0.0) {
                return Err(Error::domain("a2", format!("must be positive, got {a2}")));
            }
            (a2, SupportSource::User)
        }
        None => (s.alpha() + s.alpha_b(), SupportSource::RelevanceBound),
    };
    let support = UniformSupport {
        a1_eff,
        a2_eff,
        a1_clamped,
        a2_source,
    };
    support.check()?;
    Ok(support)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::LinkScenario;
    use proptest::prelude::*;

    fn scenario(w: f64, a: f64, ab: f64, r: f64) -> Scenario {
        LinkScenario::new(w, a, ab, r).validate().unwrap()
    }

    #[test]
    fn square_at_zero_offset_equals_c0() {
        for ratio in [0.5, 1.0, 2.0, 3.7, 10.0] {
            let s = scenario(ratio, 1.0, 1.0, 0.0);
            let c = theorem2_coefficients(&s).unwrap();
            let t1 = shadow_integral_theorem1(&s);
            assert!((t1.value - c.c0).abs() <= 4.0 * f64::EPSILON * c.c0, "ratio {ratio}");
            assert_eq!(shadow_integral_theorem2(&s).value, c.c0);
        }
    }

    #[test]
    fn empty_shadow_is_zero() {
        let s = scenario(1.0, 1.0, 0.0, 0.4);
        assert_eq!(shadow_integral_theorem1(&s).value, 0.0);
        assert_eq!(shadow_integral_theorem2(&s).value, 0.0);
    }

    #[test]
    fn c0_at_ratio_two() {
        // erf(sqrt(pi/2)/2)^2 evaluated with mpmath at 30 digits.
        let c = theorem2_coefficients(&scenario(2.0, 1.0, 1.0, 0.0)).unwrap();
        assert!((c.c0 - 0.390_006_173_767_438_8).abs() < 1e-14);
        assert!((c.c2 + 0.298_176_696_511_234_6).abs() < 1e-14);
        assert!((c.decay_rate - 0.382_271_764_611_908_1).abs() < 1e-14);
    }

    #[test]
    fn small_shadow_coefficients_vanish() {
        let c = theorem2_coefficients(&scenario(1.0, 1.0, 1e-6, 0.0)).unwrap();
        assert!(c.c0 > 0.0 && c.c0 < 1e-11);
        assert!(c.c2 < 0.0 && c.c2.abs() <= 1.0);
        assert!((c.c2 / c.c0).is_finite());
    }

    #[test]
    fn coefficients_need_a_shadow() {
        let err = theorem2_coefficients(&scenario(1.0, 1.0, 0.0, 0.0)).unwrap_err();
        assert!(matches!(err, Error::Domain { field: "alpha_b", .. }));
    }

    #[test]
    fn gaussian_decays_to_zero() {
        let s = scenario(1.0, 1.0, 0.5, 1e3);
        assert_eq!(shadow_integral_theorem2(&s).value, 0.0);
    }

    #[test]
    fn hb_without_shadow_is_collected_fraction() {
        let s = scenario(1.3, 0.7, 0.0, 0.2);
        let i = collected_fraction_unblocked(&s);
        assert_eq!(hb_theorem1(&s).value, i);
        assert_eq!(hb_theorem2(&s).value, i);
    }

    #[test]
    fn hb_far_shadow_is_collected_fraction() {
        let s = scenario(2.0, 2.0, 1.0, 200.0);
        let i = collected_fraction_unblocked(&s);
        assert!((hb_theorem1(&s).value - i).abs() < 1e-10);
        assert!((hb_theorem2(&s).value - i).abs() < 1e-10);
    }

    #[test]
    fn hb_gaussian_small_centered_shadow() {
        let s = scenario(1.0, 1.0, 0.1, 0.0);
        let i = collected_fraction_unblocked(&s);
        let c = theorem2_coefficients(&s).unwrap();
        let h = hb_theorem2(&s);
        assert!(h.value > 0.0);
        assert_eq!(h.value, i - c.c0);
    }

    #[test]
    fn hb_gaussian_tracks_square_and_exact() {
        // Exact h_b = 0.6439495500187416 from a 30-digit mpmath quadrature.
        let s = scenario(2.0, 2.0, 1.0, 1.0);
        let t1 = hb_theorem1(&s).value;
        let t2 = hb_theorem2(&s).value;
        let ex = hb_exact(&s, &Default::default()).unwrap().value;
        assert!((ex - 0.643_949_550_018_741_6).abs() < 1e-10);
        assert!((t2 - t1).abs() <= 2e-3, "{t1} vs {t2}");
        assert!((t2 - ex).abs() <= 2e-3, "{ex} vs {t2}");
    }

    #[test]
    fn support_with_large_aperture_clamps_lower_bound() {
        let s = scenario(2.0, 2.0, 1.0, 0.0);
        let sup = support_bounds(&s, None).unwrap();
        assert_eq!(sup.a1_eff, 0.0);
        assert!(sup.a1_clamped);
        assert_eq!(sup.a2_eff, 3.0);
        assert_eq!(sup.a2_source, SupportSource::RelevanceBound);
    }

    #[test]
    fn support_user_override() {
        let s = scenario(2.0, 2.0, 1.0, 0.0);
        let sup = support_bounds(&s, Some(5.0)).unwrap();
        assert_eq!(sup.a2_eff, 5.0);
        assert_eq!(sup.a2_source, SupportSource::User);
    }

    #[test]
    fn support_needs_a_shadow() {
        assert!(support_bounds(&scenario(2.0, 2.0, 0.0, 0.0), None).is_err());
    }

    #[test]
    fn support_lower_bound_is_zero_crossing() {
        // Shadow wider than the aperture: C0 > I, so h_b vanishes at a1.
        let s = scenario(1.0, 0.3, 0.8, 0.0);
        let sup = support_bounds(&s, Some(10.0)).unwrap();
        assert!(!sup.a1_clamped);
        assert!(sup.a1_eff > 0.0);
        let at = s.with_r(sup.a1_eff).unwrap();
        assert!(hb_theorem2(&at).unclamped.abs() < 1e-12);
        assert!(hb_theorem2(&s.with_r(0.5 * sup.a1_eff).unwrap()).unclamped < 0.0);
    }

    #[test]
    fn support_upper_below_lower_rejected() {
        let s = scenario(1.0, 0.3, 0.8, 0.0);
        let a1 = support_bounds(&s, Some(10.0)).unwrap().a1_eff;
        let err = support_bounds(&s, Some(0.5 * a1)).unwrap_err();
        assert!(matches!(err, Error::Domain { field: "a2", .. }));
    }

    #[test]
    fn taylor_curvature_matches_gaussian() {
        for ratio in 2..=10 {
            let w = ratio as f64;
            let s = scenario(w, 1.0, 1.0, 0.0);
            let c = theorem2_coefficients(&s).unwrap();
            let h = 1.0 / 100.0;
            let fd = (shadow_integral_theorem1(&s.with_r(h).unwrap()).value - c.c0) / (h * h);
            let target = -c.c0 * c.decay_rate;
            assert!(((fd - target) / target).abs() < 0.05, "ratio {ratio}: {fd} vs {target}");
        }
    }

    proptest! {
        #[test]
        fn c2_is_negative(w in 0.05f64..20.0, ratio in 1e-4f64..3.5) {
            let ab = ratio * w;
            let c = theorem2_coefficients(&scenario(w, 1.0, ab, 0.0));
            if let Ok(c) = c {
                prop_assert!(c.c2 < 0.0);
                prop_assert!(c.c0 > 0.0 && c.c0 < 1.0);
                prop_assert!(c.decay_rate > 0.0);
            }
        }

        #[test]
        fn approximations_decrease_in_offset(
            w in 0.2f64..20.0, ab in 0.05f64..3.0, r in 0.0f64..5.0, dr in 1e-3f64..1.0,
        ) {
            let near = scenario(w, 1.0, ab, r);
            let far = near.with_r(r + dr).unwrap();
            prop_assert!(shadow_integral_theorem1(&far).value <= shadow_integral_theorem1(&near).value);
            prop_assert!(shadow_integral_theorem2(&far).value <= shadow_integral_theorem2(&near).value);
        }

        #[test]
        fn closed_forms_never_need_clamping(
            w in 0.01f64..50.0, a in 0.01f64..10.0, ab in 0.0f64..10.0, r in 0.0f64..50.0,
        ) {
            let s = scenario(w, a, ab, r);
            prop_assert!(shadow_integral_theorem1(&s).clamp_excursion() <= 1e-9);
            prop_assert!(shadow_integral_theorem2(&s).clamp_excursion() <= 1e-9);
        }
    }
}
