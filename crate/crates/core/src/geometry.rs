//! Physical quantities of a single link instant.
//!
//! All lengths are in meters. A [`LinkScenario`] is plain data; calling
//! [`LinkScenario::validate`] yields a [`Scenario`], which every computation
//! in this crate takes by reference.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest excursion outside [0, 1] that is attributed to rounding and clamped silently.
pub const CLAMP_TOLERANCE: f64 = 1e-9;

/// Raw link geometry, not yet checked.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkScenario {
    /// Beam waist at the receive plane.
    pub w_d: f64,
    /// Radius of the receive detection aperture.
    pub alpha: f64,
    /// Radius of the blocker shadow on the receive plane.
    pub alpha_b: f64,
    /// Distance from the beam center to the shadow center.
    pub r: f64,
}

impl LinkScenario {
    pub fn new(w_d: f64, alpha: f64, alpha_b: f64, r: f64) -> Self {
        Self { w_d, alpha, alpha_b, r }
    }

    pub fn validate(self) -> Result<Scenario> {
        validate_scenario(self)
    }
}

/// A checked [`LinkScenario`] together with its relevance flag.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Scenario {
    #[serde(flatten)]
    inner: LinkScenario,
    blocker_relevant: bool,
}

impl Scenario {
    pub fn w_d(&self) -> f64 {
        self.inner.w_d
    }

    pub fn alpha(&self) -> f64 {
        self.inner.alpha
    }

    pub fn alpha_b(&self) -> f64 {
        self.inner.alpha_b
    }

    pub fn r(&self) -> f64 {
        self.inner.r
    }

    /// True when the shadow can overlap the aperture, i.e. `r - alpha_b < alpha`.
    pub fn blocker_relevant(&self) -> bool {
        self.blocker_relevant
    }

    pub fn link(&self) -> LinkScenario {
        self.inner
    }

    /// Same geometry with a different shadow offset.
    pub fn with_r(&self, r: f64) -> Result<Scenario> {
        LinkScenario { r, ..self.inner }.validate()
    }

    /// Same geometry with a different shadow radius.
    pub fn with_alpha_b(&self, alpha_b: f64) -> Result<Scenario> {
        LinkScenario { alpha_b, ..self.inner }.validate()
    }
}

/// Checks field domains and annotates the scenario with `blocker_relevant`.
pub fn validate_scenario(s: LinkScenario) -> Result<Scenario> {
    let fields = [
        ("w_d", s.w_d, false),
        ("alpha", s.alpha, false),
        ("alpha_b", s.alpha_b, true),
        ("r", s.r, true),
    ];
    for (name, value, zero_ok) in fields {
        if !value.is_finite() {
            return Err(Error::domain(name, format!("must be finite, got {value}")));
        }
        if zero_ok && value < 0.0 {
            return Err(Error::domain(name, format!("must be nonnegative, got {value}")));
        }
        if !zero_ok && value <= 0.0 {
            return Err(Error::domain(name, format!("must be positive, got {value}")));
        }
    }
    Ok(Scenario {
        inner: s,
        blocker_relevant: s.r - s.alpha_b < s.alpha,
    })
}

/// How a blockage value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    #[serde(rename = "exact")]
    ExactQuadrature,
    #[serde(rename = "theorem-1")]
    Theorem1,
    #[serde(rename = "theorem-2")]
    Theorem2,
    MonteCarlo,
}

impl Method {
    pub const ALL: [Method; 4] = [
        Method::ExactQuadrature,
        Method::Theorem1,
        Method::Theorem2,
        Method::MonteCarlo,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Method::ExactQuadrature => "exact",
            Method::Theorem1 => "theorem-1",
            Method::Theorem2 => "theorem-2",
            Method::MonteCarlo => "monte-carlo",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "exact" | "exact-quadrature" | "quadrature" => Ok(Method::ExactQuadrature),
            "theorem-1" | "theorem1" | "t1" | "square" => Ok(Method::Theorem1),
            "theorem-2" | "theorem2" | "t2" | "gaussian" => Ok(Method::Theorem2),
            "monte-carlo" | "montecarlo" | "mc" => Ok(Method::MonteCarlo),
            other => Err(Error::domain("method", format!("unknown method `{other}`"))),
        }
    }
}

/// An `I_b` or `h_b` value with its provenance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlockageResult {
    /// Value in [0, 1].
    pub value: f64,
    pub method: Method,
    /// Quadrature error bound or Monte Carlo standard error; zero for closed forms.
    pub error_estimate: f64,
    /// Value before it was clamped into [0, 1].
    pub unclamped: f64,
}

impl BlockageResult {
    pub(crate) fn closed_form(raw: f64, method: Method) -> Self {
        Self {
            value: raw.clamp(0.0, 1.0),
            method,
            error_estimate: 0.0,
            unclamped: raw,
        }
    }

    /// Distance by which the unclamped value left [0, 1].
    pub fn clamp_excursion(&self) -> f64 {
        (self.unclamped - self.value).abs()
    }
}

/// Clamps into [0, 1], refusing excursions larger than [`CLAMP_TOLERANCE`].
pub(crate) fn clamp_unit(raw: f64) -> Result<f64> {
    let clamped = raw.clamp(0.0, 1.0);
    let excess = (raw - clamped).abs();
    if excess > CLAMP_TOLERANCE || raw.is_nan() {
        return Err(Error::ClampExceeded { value: raw, excess });
    }
    Ok(clamped)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn centered_shadow_is_relevant() {
        let s = LinkScenario::new(1.0, 0.05, 0.01, 0.0).validate().unwrap();
        assert!(s.blocker_relevant());
    }

    #[test]
    fn distant_shadow_is_irrelevant() {
        let s = LinkScenario::new(1.0, 0.05, 0.01, 1.0).validate().unwrap();
        assert!(!s.blocker_relevant());
    }

    #[test]
    fn zero_waist_rejected() {
        let err = LinkScenario::new(0.0, 0.05, 0.01, 0.0).validate().unwrap_err();
        assert!(matches!(err, Error::Domain { field: "w_d", .. }), "{err}");
        assert!(err.to_string().contains("must be positive"));
    }

    #[test]
    fn each_field_is_named_in_errors() {
        let cases = [
            (LinkScenario::new(1.0, 0.0, 0.1, 0.0), "alpha"),
            (LinkScenario::new(1.0, 1.0, -0.1, 0.0), "alpha_b"),
            (LinkScenario::new(1.0, 1.0, 0.1, -1.0), "r"),
            (LinkScenario::new(f64::NAN, 1.0, 0.1, 0.0), "w_d"),
            (LinkScenario::new(1.0, f64::INFINITY, 0.1, 0.0), "alpha"),
            (LinkScenario::new(1.0, 1.0, 0.1, f64::NEG_INFINITY), "r"),
        ];
        for (s, name) in cases {
            match s.validate() {
                Err(Error::Domain { field, .. }) => assert_eq!(field, name),
                other => panic!("expected domain error on {name}, got {other:?}"),
            }
        }
    }

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.as_str().parse::<Method>().unwrap(), m);
        }
        assert!("simpson".parse::<Method>().is_err());
    }

    #[test]
    fn clamp_allows_only_rounding() {
        assert_eq!(clamp_unit(1.0 + 5e-10).unwrap(), 1.0);
        assert_eq!(clamp_unit(-5e-10).unwrap(), 0.0);
        assert!(clamp_unit(1.0 + 1e-6).is_err());
        assert!(clamp_unit(f64::NAN).is_err());
    }

    proptest! {
        #[test]
        fn validation_is_idempotent(
            w in 1e-3f64..10.0, a in 1e-3f64..10.0, ab in 0.0f64..10.0, r in 0.0f64..20.0,
        ) {
            let once = LinkScenario::new(w, a, ab, r).validate().unwrap();
            let twice = once.link().validate().unwrap();
            prop_assert_eq!(once, twice);
        }

        #[test]
        fn relevance_never_returns_once_lost(
            w in 1e-3f64..10.0, a in 1e-3f64..10.0, ab in 0.0f64..10.0,
            r1 in 0.0f64..20.0, dr in 0.0f64..20.0,
        ) {
            let near = LinkScenario::new(w, a, ab, r1).validate().unwrap();
            let far = near.with_r(r1 + dr).unwrap();
            prop_assert!(!(far.blocker_relevant() && !near.blocker_relevant()));
        }
    }
}
