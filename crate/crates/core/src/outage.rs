//! Capacity and outage probability under a uniformly distributed shadow offset.
//!
//! With the Gaussian approximation `h_b(r) = I - C0 exp(-k r^2)`, which
//! increases in `r`, the outage event `h_b(r) <= (gamma_th - 1) N_o / P_s`
//! is `r <= r*` where
//!
//! ```text
//! Y  = [I - (gamma_th - 1) N_o / P_s] / C0
//! r* = sqrt(ln(1 / Y) / k)
//! ```
//!
//! and `P_o = F_r(r*)`. `Y >= 1` makes the event empty and `Y <= 0` makes it
//! certain.

use std::fmt;

use serde::Serialize;

use crate::approx::{hb, theorem2_coefficients, HbMethod, UniformSupport};
use crate::error::{Error, Result};
use crate::exact::collected_fraction_unblocked;
use crate::geometry::Scenario;

/// Transmit power, noise power and rate threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OutageParams {
    /// Transmit power in watts.
    pub p_s: f64,
    /// Noise power in watts.
    pub n_o: f64,
    /// Rate threshold in bits/s/Hz.
    pub r_th: f64,
}

impl OutageParams {
    pub fn new(p_s: f64, n_o: f64, r_th: f64) -> Result<Self> {
        if !(p_s.is_finite() && p_s > 0.0) {
            return Err(Error::domain("p_s", format!("must be positive, got {p_s}")));
        }
        if !(n_o.is_finite() && n_o > 0.0) {
            return Err(Error::domain("n_o", format!("must be positive, got {n_o}")));
        }
        if !(r_th.is_finite() && r_th >= 0.0) {
            return Err(Error::domain("r_th", format!("must be nonnegative, got {r_th}")));
        }
        Ok(Self { p_s, n_o, r_th })
    }

    /// Unit noise power and `P_s = 10^(snr_db / 10)`.
    pub fn from_snr_db(snr_db: f64, r_th: f64) -> Result<Self> {
        Self::new(10f64.powf(snr_db / 10.0), 1.0, r_th)
    }

    /// SNR threshold `2^r_th`.
    pub fn gamma_th(&self) -> f64 {
        self.r_th.exp2()
    }

    pub fn snr(&self) -> f64 {
        self.p_s / self.n_o
    }

    /// Smallest `h_b` that still meets the rate threshold.
    pub fn hb_threshold(&self) -> f64 {
        (self.gamma_th() - 1.0) * self.n_o / self.p_s
    }
}

/// Uniform distribution of the shadow offset over `[a1_eff, a2_eff]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UniformOffsetModel {
    pub support: UniformSupport,
}

impl UniformOffsetModel {
    pub fn new(support: UniformSupport) -> Result<Self> {
        support.check()?;
        Ok(Self { support })
    }
}

pub fn uniform_pdf(x: f64, m: &UniformOffsetModel) -> f64 {
    let s = &m.support;
    if x >= s.a1_eff && x <= s.a2_eff {
        1.0 / s.width()
    } else {
        0.0
    }
}

pub fn uniform_cdf(x: f64, m: &UniformOffsetModel) -> f64 {
    let s = &m.support;
    if x <= s.a1_eff {
        0.0
    } else if x >= s.a2_eff {
        1.0
    } else {
        (x - s.a1_eff) / s.width()
    }
}

/// `log2(1 + h_b P_s / N_o)`.
pub fn capacity(s: &Scenario, p: &OutageParams, method: &HbMethod) -> Result<f64> {
    let h = hb(s, method)?.value;
    Ok((h * p.snr()).ln_1p() / std::f64::consts::LN_2)
}

/// Sign of the noise term in `Y`.
///
/// `Minus` follows from solving the outage inequality for `r`. `Plus` is the
/// sign printed in the original closed form; it is kept only so regression
/// tests can show it disagrees with simulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NoiseTermSign {
    #[default]
    Minus,
    Plus,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "radius", rename_all = "kebab-case")]
pub enum ThresholdRadius {
    /// `Y >= 1`: no offset puts the link in outage.
    AlwaysServed,
    /// `Y <= 0`: every offset puts the link in outage.
    AlwaysOut,
    /// Outage exactly when the offset is at most this radius.
    Radius(f64),
}

impl ThresholdRadius {
    pub fn radius(&self) -> Option<f64> {
        match self {
            ThresholdRadius::Radius(r) => Some(*r),
            _ => None,
        }
    }
}

pub fn outage_threshold_radius(s: &Scenario, p: &OutageParams) -> Result<ThresholdRadius> {
    outage_threshold_radius_with(s, p, NoiseTermSign::Minus)
}

pub fn outage_threshold_radius_with(s: &Scenario, p: &OutageParams, sign: NoiseTermSign) -> Result<ThresholdRadius> {
    let c = theorem2_coefficients(s)?;
    let i = collected_fraction_unblocked(s);
    let noise = match sign {
        NoiseTermSign::Minus => -p.hb_threshold(),
        NoiseTermSign::Plus => p.hb_threshold(),
    };
    let y = (i + noise) / c.c0;
    Ok(if y >= 1.0 {
        ThresholdRadius::AlwaysServed
    } else if y <= 0.0 {
        ThresholdRadius::AlwaysOut
    } else {
        ThresholdRadius::Radius((-y.ln() / c.decay_rate).sqrt())
    })
}

/// Which piece of the closed form applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Branch {
    /// Threshold radius below the support: never in outage.
    C1,
    /// Threshold radius inside the support.
    C2,
    /// Threshold radius above the support: always in outage.
    C3,
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Branch::C1 => "C1",
            Branch::C2 => "C2",
            Branch::C3 => "C3",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OutageResult {
    pub probability: f64,
    pub branch: Branch,
    pub threshold: ThresholdRadius,
}

pub fn outage_probability(s: &Scenario, p: &OutageParams, m: &UniformOffsetModel) -> Result<OutageResult> {
    outage_probability_with(s, p, m, NoiseTermSign::Minus)
}

pub fn outage_probability_with(
    s: &Scenario,
    p: &OutageParams,
    m: &UniformOffsetModel,
    sign: NoiseTermSign,
) -> Result<OutageResult> {
    let threshold = outage_threshold_radius_with(s, p, sign)?;
    let support = &m.support;
    let (probability, branch) = match threshold {
        ThresholdRadius::AlwaysServed => (0.0, Branch::C1),
        ThresholdRadius::AlwaysOut => (1.0, Branch::C3),
        ThresholdRadius::Radius(r) => {
            let branch = if r < support.a1_eff {
                Branch::C1
            } else if r > support.a2_eff {
                Branch::C3
            } else {
                Branch::C2
            };
            (uniform_cdf(r, m), branch)
        }
    };
    Ok(OutageResult {
        probability,
        branch,
        threshold,
    })
}
