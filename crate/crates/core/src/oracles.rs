//! Brute-force validators for the closed forms.
//!
//! Monte Carlo draws are split into fixed-size blocks. Block `i` uses a
//! ChaCha8 generator seeded from the root seed on stream `i`, so the sample
//! set does not depend on how blocks are scheduled across threads. Block
//! sums are compensated and reduced in block order, which makes every
//! estimate bitwise reproducible for a given `(inputs, seed)` regardless of
//! the rayon pool size.

use std::f64::consts::PI;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::approx::{shadow_integral_theorem1, shadow_integral_theorem2, HbMethod};
use crate::error::{Error, Result};
use crate::exact::{shadow_integral_exact, QuadratureConfig};
use crate::geometry::{BlockageResult, LinkScenario, Method, Scenario};
use crate::outage::{capacity, OutageParams, UniformOffsetModel};

const BLOCK_SIZE: u64 = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct McConfig {
    pub samples: u64,
    pub seed: u64,
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            samples: 1_000_000,
            seed: 42,
        }
    }
}

impl McConfig {
    pub fn new(samples: u64, seed: u64) -> Result<Self> {
        let c = Self { samples, seed };
        c.check()?;
        Ok(c)
    }

    pub fn check(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::domain("samples", "must be at least 1"));
        }
        Ok(())
    }
}

/// Neumaier compensated sum.
#[derive(Debug, Clone, Copy, Default)]
struct Compensated {
    sum: f64,
    carry: f64,
}

impl Compensated {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// Sample mean and standard error of the mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub samples: u64,
}

/// Mean and standard error of `draw` over `c.samples` draws.
///
/// Each block keeps its draws and computes its squared deviations in a
/// second pass; blocks are merged in order with the pairwise update for
/// (count, mean, M2).
fn sample_mean<F>(c: &McConfig, draw: F) -> McEstimate
where
    F: Fn(&mut ChaCha8Rng) -> f64 + Sync,
{
    let blocks = c.samples.div_ceil(BLOCK_SIZE);
    let partials: Vec<(f64, f64, f64)> = (0..blocks)
        .into_par_iter()
        .map(|block| {
            let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
            rng.set_stream(block);
            let n = BLOCK_SIZE.min(c.samples - block * BLOCK_SIZE);
            let values: Vec<f64> = (0..n).map(|_| draw(&mut rng)).collect();
            let mut sum = Compensated::default();
            values.iter().for_each(|&v| sum.add(v));
            let mean = sum.value() / n as f64;
            let mut m2 = Compensated::default();
            values.iter().for_each(|&v| m2.add((v - mean) * (v - mean)));
            (n as f64, sum.value(), m2.value())
        })
        .collect();

    let mut total = Compensated::default();
    let (mut count, mut mean, mut m2) = (0.0f64, 0.0f64, 0.0f64);
    for (n_b, sum_b, m2_b) in partials {
        total.add(sum_b);
        let mean_b = sum_b / n_b;
        let merged = count + n_b;
        let delta = mean_b - mean;
        m2 += m2_b + delta * delta * count * n_b / merged;
        mean += delta * n_b / merged;
        count = merged;
    }
    let n = c.samples as f64;
    let std_error = if c.samples > 1 {
        (m2 / (n - 1.0) / n).sqrt()
    } else {
        0.0
    };
    McEstimate {
        estimate: total.value() / n,
        std_error,
        samples: c.samples,
    }
}

/// Shadow integral by uniform sampling of the shadow disk.
///
/// Points are drawn uniformly in the disk of radius `alpha_b` centered at
/// `(r, 0)` (radius by inverse CDF, `rho = alpha_b sqrt(u)`), and the beam
/// density is averaged and multiplied by the disk area.
pub fn mc_shadow_integral(s: &Scenario, c: &McConfig) -> Result<BlockageResult> {
    c.check()?;
    let (w, ab, r) = (s.w_d(), s.alpha_b(), s.r());
    if ab == 0.0 {
        return Err(Error::domain("alpha_b", "must be positive for disk sampling"));
    }
    let area = PI * ab * ab;
    let density = 2.0 / (PI * w * w);
    let est = sample_mean(c, |rng| {
        let rho = ab * rng.random::<f64>().sqrt();
        let phi = 2.0 * PI * rng.random::<f64>();
        let (sin, cos) = phi.sin_cos();
        let x = r + rho * cos;
        let y = rho * sin;
        area * density * (-2.0 * (x * x + y * y) / (w * w)).exp()
    });
    Ok(BlockageResult {
        value: est.estimate.clamp(0.0, 1.0),
        method: Method::MonteCarlo,
        error_estimate: est.std_error,
        unclamped: est.estimate,
    })
}

/// Fraction of uniformly drawn offsets whose capacity is at most `r_th`.
pub fn mc_outage(
    s: &Scenario,
    p: &OutageParams,
    m: &UniformOffsetModel,
    c: &McConfig,
    hb_method: &HbMethod,
) -> Result<McEstimate> {
    c.check()?;
    let (a1, a2) = (m.support.a1_eff, m.support.a2_eff);
    let link = s.link();
    // Validate once up front so the per-sample closure cannot fail on domain.
    capacity(s, p, hb_method)?;
    let failure = std::sync::Mutex::new(None);
    let est = sample_mean(c, |rng| {
        let r = rng.random_range(a1..=a2);
        let at = LinkScenario { r, ..link }
            .validate()
            .expect("offset drawn from a nonnegative support");
        match capacity(&at, p, hb_method) {
            Ok(cap) => f64::from(u8::from(cap <= p.r_th)),
            Err(e) => {
                failure.lock().unwrap().get_or_insert(e);
                f64::NAN
            }
        }
    });
    if let Some(e) = failure.into_inner().unwrap() {
        return Err(e);
    }
    let q = est.estimate;
    Ok(McEstimate {
        estimate: q,
        std_error: (q * (1.0 - q) / c.samples as f64).sqrt(),
        samples: c.samples,
    })
}

/// Uniform grid over the normalized offset `r / alpha_b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RGrid {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl Default for RGrid {
    fn default() -> Self {
        Self {
            start: 0.0,
            stop: 6.0,
            points: 121,
        }
    }
}

impl RGrid {
    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        let step = if self.points > 1 {
            (self.stop - self.start) / (self.points - 1) as f64
        } else {
            0.0
        };
        (0..self.points).map(move |i| self.start + step * i as f64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorReport {
    pub mse: f64,
    /// `mse` divided by the mean squared reference value.
    pub nmse: f64,
    pub max_abs_error: f64,
    pub grid: RGrid,
}

/// MSE, NMSE and max error of `approx` against `reference`.
pub fn error_report(reference: &[f64], approx: &[f64], grid: RGrid) -> Result<ErrorReport> {
    if reference.len() != approx.len() || reference.is_empty() {
        return Err(Error::domain(
            "grid",
            format!(
                "need equal nonempty series, got {} and {}",
                reference.len(),
                approx.len()
            ),
        ));
    }
    let n = reference.len() as f64;
    let (mut sq_err, mut sq_ref, mut max_abs) = (0.0, 0.0, 0.0f64);
    for (e, a) in reference.iter().zip(approx) {
        let d = e - a;
        sq_err += d * d;
        sq_ref += e * e;
        max_abs = max_abs.max(d.abs());
    }
    let mse = sq_err / n;
    let mean_sq = sq_ref / n;
    Ok(ErrorReport {
        mse,
        nmse: if mean_sq > 0.0 { mse / mean_sq } else { 0.0 },
        max_abs_error: max_abs,
        grid,
    })
}

/// Published MSE and NMSE of the Gaussian approximation against the exact
/// shadow integral, as `(w_d / alpha_b, mse, nmse)`.
pub const REFERENCE_ERRORS: [(f64, f64, f64); 9] = [
    (2.0, 5.81e-6, 5.99e-5),
    (3.0, 3.29e-7, 1.52e-5),
    (4.0, 3.73e-8, 5.25e-6),
    (5.0, 6.59e-9, 2.25e-6),
    (6.0, 1.59e-9, 1.11e-6),
    (7.0, 4.65e-10, 6.07e-7),
    (8.0, 1.59e-10, 3.59e-7),
    (9.0, 6.3e-11, 2.25e-7),
    (10.0, 2.69e-11, 1.49e-7),
];

/// Compares an approximation against quadrature on `grid`, with `alpha_b = 1`.
pub fn approximation_error_sweep(
    wd_over_ab: f64,
    method: Method,
    grid: RGrid,
    q: &QuadratureConfig,
) -> Result<ErrorReport> {
    if !(wd_over_ab.is_finite() && wd_over_ab > 0.0) {
        return Err(Error::domain(
            "wd_over_ab",
            format!("must be positive, got {wd_over_ab}"),
        ));
    }
    if grid.points == 0 || !(grid.start >= 0.0 && grid.stop >= grid.start) {
        return Err(Error::domain("grid", "need points >= 1 and 0 <= start <= stop"));
    }
    let approx_fn: fn(&Scenario) -> BlockageResult = match method {
        Method::Theorem1 => shadow_integral_theorem1,
        Method::Theorem2 => shadow_integral_theorem2,
        Method::ExactQuadrature | Method::MonteCarlo => {
            return Err(Error::domain(
                "method",
                format!("{method} is not a closed-form approximation"),
            ))
        }
    };
    let offsets: Vec<f64> = grid.values().collect();
    let pairs: Vec<(f64, f64)> = offsets
        .par_iter()
        .map(|&r| {
            let s = LinkScenario::new(wd_over_ab, 1.0, 1.0, r).validate()?;
            Ok((shadow_integral_exact(&s, q)?.value, approx_fn(&s).value))
        })
        .collect::<Result<_>>()?;
    let (exact, approx): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
    error_report(&exact, &approx, grid)
}
