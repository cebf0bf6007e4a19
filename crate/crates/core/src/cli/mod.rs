//! Command implementations behind the `blockage` binary.
//!
//! Every command returns its standard output as a `String` so that output is
//! a pure function of the inputs and seed.

pub mod file;
pub mod units;

use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;
use thiserror::Error;

use crate::approx::{self, support_bounds, HbMethod, UniformSupport};
use crate::exact::{collected_fraction_unblocked, QuadratureConfig};
use crate::geometry::{BlockageResult, Method, Scenario};
use crate::oracles::{self, approximation_error_sweep, ErrorReport, RGrid, REFERENCE_ERRORS};
use crate::outage::{outage_probability, OutageParams, OutageResult, UniformOffsetModel};

pub use file::{load_experiment, parse_experiment, Experiment};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("file not found: {0}")]
    NotFound(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("domain error: {0}")]
    Domain(crate::Error),
    #[error("convergence error: {0}")]
    Convergence(crate::Error),
    #[error("validation failed: {0}")]
    ValidationFailed(String),
    #[error("cannot write {path}: {source}")]
    Unwritable { path: String, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::NotFound(_) => 3,
            CliError::Parse(_) => 4,
            CliError::Domain(_) => 5,
            CliError::Convergence(_) => 6,
            CliError::ValidationFailed(_) => 7,
            CliError::Unwritable { .. } => 8,
        }
    }
}

impl From<crate::Error> for CliError {
    fn from(e: crate::Error) -> Self {
        match e {
            crate::Error::Domain { .. } => CliError::Domain(e),
            crate::Error::Convergence { .. } | crate::Error::ClampExceeded { .. } => CliError::Convergence(e),
        }
    }
}

/// Overrides from the command line, applied on top of the scenario file.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub abs_tol: Option<f64>,
    pub rel_tol: Option<f64>,
    pub samples: Option<u64>,
    pub seed: Option<u64>,
    pub a2: Option<f64>,
    pub snr_db: Option<f64>,
    pub r_th: Option<f64>,
}

impl Overrides {
    pub fn apply(&self, e: &mut Experiment) -> Result<(), CliError> {
        if let Some(v) = self.abs_tol {
            e.quadrature.abs_tol = v;
        }
        if let Some(v) = self.rel_tol {
            e.quadrature.rel_tol = v;
        }
        e.quadrature.check()?;
        if let Some(v) = self.samples {
            e.monte_carlo.samples = v;
        }
        if let Some(v) = self.seed {
            e.monte_carlo.seed = v;
        }
        e.monte_carlo.check()?;
        if self.a2.is_some() {
            e.a2 = self.a2;
        }
        if self.snr_db.is_some() || self.r_th.is_some() {
            let base = e.outage;
            let r_th = self
                .r_th
                .or(base.map(|p| p.r_th))
                .ok_or_else(|| CliError::Usage("--snr-db without an [outage] section also needs --r-th".into()))?;
            e.outage = Some(match (self.snr_db, base) {
                (Some(db), _) => OutageParams::from_snr_db(db, r_th)?,
                (None, Some(p)) => OutageParams::new(p.p_s, p.n_o, r_th)?,
                (None, None) => {
                    return Err(CliError::Usage(
                        "--r-th without an [outage] section also needs --snr-db".into(),
                    ))
                }
            });
        }
        Ok(())
    }
}

/// `I_b` and `h_b` for one method, with alpha_b = 0 handled for every method.
fn evaluate(s: &Scenario, method: Method, e: &Experiment) -> Result<(BlockageResult, BlockageResult), CliError> {
    let i = collected_fraction_unblocked(s);
    let shadow = match method {
        Method::MonteCarlo if s.alpha_b() == 0.0 => BlockageResult {
            value: 0.0,
            method,
            error_estimate: 0.0,
            unclamped: 0.0,
        },
        Method::MonteCarlo => oracles::mc_shadow_integral(s, &e.monte_carlo)?,
        m => approx::shadow_integral(s, &HbMethod::from_method(m, e.quadrature)?)?,
    };
    let raw = i - shadow.value;
    let hb = BlockageResult {
        value: raw.clamp(0.0, 1.0),
        method,
        error_estimate: shadow.error_estimate,
        unclamped: raw,
    };
    Ok((shadow, hb))
}

pub fn parse_methods(list: &str) -> Result<Vec<Method>, CliError> {
    let mut out = Vec::new();
    for item in list.split(',').filter(|s| !s.trim().is_empty()) {
        let m: Method = item.parse().map_err(|e: crate::Error| CliError::Usage(e.to_string()))?;
        if !out.contains(&m) {
            out.push(m);
        }
    }
    if out.is_empty() {
        return Err(CliError::Usage("--method needs at least one method".into()));
    }
    Ok(out)
}

pub const DEFAULT_METHODS: [Method; 3] = [Method::ExactQuadrature, Method::Theorem1, Method::Theorem2];

pub fn cmd_hb(e: &Experiment, methods: &[Method], as_json: bool) -> Result<String, CliError> {
    let s = &e.scenario;
    let i = collected_fraction_unblocked(s);
    let rows = methods
        .iter()
        .map(|&m| evaluate(s, m, e))
        .collect::<Result<Vec<_>, _>>()?;

    if as_json {
        #[derive(Serialize)]
        struct Row {
            method: Method,
            shadow_integral: f64,
            hb: f64,
            error_estimate: f64,
        }
        let rows: Vec<Row> = rows
            .iter()
            .map(|(sh, hb)| Row {
                method: sh.method,
                shadow_integral: sh.value,
                hb: hb.value,
                error_estimate: sh.error_estimate,
            })
            .collect();
        let doc = json!({
            "scenario": s,
            "collected_fraction": i,
            "results": rows,
        });
        return Ok(serde_json::to_string_pretty(&doc).expect("serializable") + "\n");
    }

    let mut out = String::new();
    writeln!(
        out,
        "w_d = {:?} m, alpha = {:?} m, alpha_b = {:?} m, r = {:?} m (blocker relevant: {})",
        s.w_d(),
        s.alpha(),
        s.alpha_b(),
        s.r(),
        s.blocker_relevant()
    )
    .unwrap();
    writeln!(out, "I = {i:?}").unwrap();
    writeln!(out, "{:<12} {:>24} {:>24} {:>12}", "method", "I_b", "h_b", "error").unwrap();
    for (sh, hb) in rows {
        writeln!(
            out,
            "{:<12} {:>24} {:>24} {:>12.3e}",
            sh.method.as_str(),
            format!("{:?}", sh.value),
            format!("{:?}", hb.value),
            sh.error_estimate
        )
        .unwrap();
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVariable {
    R,
    AlphaB,
    SnrDb,
    RTh,
}

impl std::str::FromStr for SweepVariable {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "r" => Ok(SweepVariable::R),
            "alpha_b" => Ok(SweepVariable::AlphaB),
            "snr_db" => Ok(SweepVariable::SnrDb),
            "r_th" => Ok(SweepVariable::RTh),
            other => Err(CliError::Usage(format!(
                "unknown sweep variable `{other}` (expected r, alpha_b, snr_db or r_th)"
            ))),
        }
    }
}

impl SweepVariable {
    pub fn name(&self) -> &'static str {
        match self {
            SweepVariable::R => "r",
            SweepVariable::AlphaB => "alpha_b",
            SweepVariable::SnrDb => "snr_db",
            SweepVariable::RTh => "r_th",
        }
    }

    /// Lengths take unit suffixes; the other variables are plain numbers.
    pub fn parse_value(&self, text: &str) -> Result<f64, CliError> {
        match self {
            SweepVariable::R | SweepVariable::AlphaB => units::parse_length(text).map_err(CliError::Usage),
            SweepVariable::SnrDb | SweepVariable::RTh => text
                .trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("cannot read a number from `{text}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
    pub methods: Vec<Method>,
}

impl SweepSpec {
    pub fn check(&self) -> Result<(), CliError> {
        if !(self.start.is_finite() && self.stop.is_finite() && self.start < self.stop) {
            return Err(CliError::Usage(format!(
                "sweep needs start < stop, got {} and {}",
                self.start, self.stop
            )));
        }
        if self.steps < 2 {
            return Err(CliError::Usage(format!(
                "sweep needs at least 2 steps, got {}",
                self.steps
            )));
        }
        if self.methods.is_empty() {
            return Err(CliError::Usage("sweep needs at least one method".into()));
        }
        Ok(())
    }

    pub fn points(&self) -> Vec<f64> {
        let step = (self.stop - self.start) / (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| {
                if i + 1 == self.steps {
                    self.stop
                } else {
                    self.start + step * i as f64
                }
            })
            .collect()
    }
}

/// Sweep values as a table: one row per point, one column per method.
///
/// For `r` and `alpha_b` the columns are `h_b`. For `snr_db` and `r_th`
/// they are outage probabilities: `theorem-2` is the closed form, and the
/// other methods are Monte Carlo estimates with `h_b` from that method
/// (`monte-carlo` uses the Gaussian approximation).
pub fn sweep_table(e: &Experiment, spec: &SweepSpec) -> Result<Vec<Vec<f64>>, CliError> {
    spec.check()?;
    let points = spec.points();
    points
        .par_iter()
        .map(|&x| {
            let mut row = vec![x];
            match spec.variable {
                SweepVariable::R | SweepVariable::AlphaB => {
                    let s = if spec.variable == SweepVariable::R {
                        e.scenario.with_r(x)?
                    } else {
                        e.scenario.with_alpha_b(x)?
                    };
                    for &m in &spec.methods {
                        row.push(evaluate(&s, m, e)?.1.value);
                    }
                }
                SweepVariable::SnrDb | SweepVariable::RTh => {
                    let base = e.outage.ok_or_else(|| {
                        CliError::Usage("outage sweeps need an [outage] section or --snr-db/--r-th".into())
                    })?;
                    let p = if spec.variable == SweepVariable::SnrDb {
                        OutageParams::from_snr_db(x, base.r_th)?
                    } else {
                        OutageParams::new(base.p_s, base.n_o, x)?
                    };
                    let model = UniformOffsetModel::new(support_bounds(&e.scenario, e.a2)?)?;
                    for &m in &spec.methods {
                        let v = match m {
                            Method::Theorem2 => outage_probability(&e.scenario, &p, &model)?.probability,
                            Method::MonteCarlo => {
                                oracles::mc_outage(&e.scenario, &p, &model, &e.monte_carlo, &HbMethod::Theorem2)?
                                    .estimate
                            }
                            other => {
                                let hm = HbMethod::from_method(other, e.quadrature)?;
                                oracles::mc_outage(&e.scenario, &p, &model, &e.monte_carlo, &hm)?.estimate
                            }
                        };
                        row.push(v);
                    }
                }
            }
            Ok(row)
        })
        .collect()
}

pub fn write_sweep_csv<W: std::io::Write>(w: W, spec: &SweepSpec, rows: &[Vec<f64>]) -> csv::Result<()> {
    let mut out = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w);
    let mut header = vec![spec.variable.name().to_string()];
    header.extend(spec.methods.iter().map(|m| m.as_str().to_string()));
    out.write_record(&header)?;
    for row in rows {
        out.write_record(row.iter().map(|v| format!("{v:?}")))?;
    }
    out.flush()?;
    Ok(())
}

pub fn cmd_sweep(e: &Experiment, spec: &SweepSpec, out: &Path) -> Result<String, CliError> {
    let rows = sweep_table(e, spec)?;
    let unwritable = |source| CliError::Unwritable {
        path: out.display().to_string(),
        source,
    };
    let file = std::fs::File::create(out).map_err(unwritable)?;
    write_sweep_csv(std::io::BufWriter::new(file), spec, &rows).map_err(|err| match err.into_kind() {
        csv::ErrorKind::Io(io) => unwritable(io),
        other => unwritable(std::io::Error::other(format!("{other:?}"))),
    })?;
    Ok(format!(
        "wrote {} rows x {} methods to {}\n",
        rows.len(),
        spec.methods.len(),
        out.display()
    ))
}

/// One row of the approximation-error table.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ValidationRow {
    pub wd_over_ab: f64,
    pub report: ErrorReport,
    pub reference_mse: f64,
    pub reference_nmse: f64,
    /// `|log10(nmse / reference_nmse)|`.
    pub decades_off: f64,
    pub within_tolerance: bool,
}

pub fn validation_rows(tolerance_decades: f64, q: &QuadratureConfig) -> Result<Vec<ValidationRow>, CliError> {
    REFERENCE_ERRORS
        .iter()
        .map(|&(ratio, ref_mse, ref_nmse)| {
            let report = approximation_error_sweep(ratio, Method::Theorem2, RGrid::default(), q)?;
            let decades_off = (report.nmse / ref_nmse).log10().abs();
            Ok(ValidationRow {
                wd_over_ab: ratio,
                report,
                reference_mse: ref_mse,
                reference_nmse: ref_nmse,
                decades_off,
                within_tolerance: decades_off <= tolerance_decades,
            })
        })
        .collect()
}

pub fn nmse_strictly_decreasing(rows: &[ValidationRow]) -> bool {
    rows.windows(2).all(|w| w[1].report.nmse < w[0].report.nmse)
}

/// Error table of the Gaussian approximation next to the published values.
///
/// Returns the report and whether every check passed.
pub fn cmd_validate(tolerance_decades: f64, q: &QuadratureConfig, as_json: bool) -> Result<(String, bool), CliError> {
    if !(tolerance_decades.is_finite() && tolerance_decades > 0.0) {
        return Err(CliError::Usage(format!(
            "tolerance must be positive, got {tolerance_decades}"
        )));
    }
    q.check()?;
    let rows = validation_rows(tolerance_decades, q)?;
    let monotone = nmse_strictly_decreasing(&rows);
    let passed = monotone && rows.iter().all(|r| r.within_tolerance);

    if as_json {
        let doc = json!({
            "tolerance_decades": tolerance_decades,
            "rows": rows,
            "nmse_strictly_decreasing": monotone,
            "passed": passed,
        });
        return Ok((serde_json::to_string_pretty(&doc).expect("serializable") + "\n", passed));
    }

    let mut out = String::new();
    writeln!(
        out,
        "{:>7} {:>12} {:>12} {:>12} {:>12} {:>8} {:>7}",
        "wd/ab", "mse", "ref mse", "nmse", "ref nmse", "decades", "verdict"
    )
    .unwrap();
    for r in &rows {
        writeln!(
            out,
            "{:>7} {:>12.3e} {:>12.3e} {:>12.3e} {:>12.3e} {:>8.3} {:>7}",
            r.wd_over_ab,
            r.report.mse,
            r.reference_mse,
            r.report.nmse,
            r.reference_nmse,
            r.decades_off,
            if r.within_tolerance { "PASS" } else { "FAIL" }
        )
        .unwrap();
    }
    writeln!(
        out,
        "grid: r/alpha_b in [{}, {}], {} points; tolerance {} decade(s)",
        RGrid::default().start,
        RGrid::default().stop,
        RGrid::default().points,
        tolerance_decades
    )
    .unwrap();
    writeln!(
        out,
        "nmse strictly decreasing: {}",
        if monotone { "PASS" } else { "FAIL" }
    )
    .unwrap();
    writeln!(out, "overall: {}", if passed { "PASS" } else { "FAIL" }).unwrap();
    Ok((out, passed))
}

fn describe_support(sup: &UniformSupport) -> String {
    format!(
        "support: [{:?}, {:?}] m (a1 {}; a2 from {})",
        sup.a1_eff,
        sup.a2_eff,
        if sup.a1_clamped {
            "clamped to 0"
        } else {
            "from zero crossing of h_b"
        },
        match sup.a2_source {
            approx::SupportSource::ClosedForm => "closed-form bound",
            approx::SupportSource::RelevanceBound => "relevance bound alpha + alpha_b",
            approx::SupportSource::User => "user",
        }
    )
}

pub fn cmd_bounds(e: &Experiment, as_json: bool) -> Result<String, CliError> {
    let sup = support_bounds(&e.scenario, e.a2)?;
    if as_json {
        return Ok(serde_json::to_string_pretty(&sup).expect("serializable") + "\n");
    }
    Ok(describe_support(&sup) + "\n")
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct McComparison {
    pub estimate: f64,
    pub std_error: f64,
    pub samples: u64,
    pub seed: u64,
    pub agrees: bool,
}

/// Closed-form outage probability, optionally checked against Monte Carlo.
pub fn outage_report(
    e: &Experiment,
    with_mc: bool,
) -> Result<(UniformSupport, OutageResult, Option<McComparison>), CliError> {
    let p = e
        .outage
        .ok_or_else(|| CliError::Usage("outage needs an [outage] section or --snr-db and --r-th".into()))?;
    let sup = support_bounds(&e.scenario, e.a2)?;
    let model = UniformOffsetModel::new(sup)?;
    let closed = outage_probability(&e.scenario, &p, &model)?;
    let mc = if with_mc {
        let est = oracles::mc_outage(&e.scenario, &p, &model, &e.monte_carlo, &HbMethod::Theorem2)?;
        let diff = (est.estimate - closed.probability).abs();
        Some(McComparison {
            estimate: est.estimate,
            std_error: est.std_error,
            samples: est.samples,
            seed: e.monte_carlo.seed,
            agrees: diff <= 3.0 * est.std_error,
        })
    } else {
        None
    };
    Ok((sup, closed, mc))
}

pub fn cmd_outage(e: &Experiment, with_mc: bool, as_json: bool) -> Result<(String, bool), CliError> {
    let (sup, closed, mc) = outage_report(e, with_mc)?;
    let p = e.outage.expect("checked by outage_report");
    let agrees = mc.is_none_or(|m| m.agrees);
    if as_json {
        let doc = json!({
            "params": p,
            "gamma_th": p.gamma_th(),
            "support": sup,
            "outage": closed,
            "monte_carlo": mc,
        });
        return Ok((serde_json::to_string_pretty(&doc).expect("serializable") + "\n", agrees));
    }
    let mut out = String::new();
    writeln!(
        out,
        "snr = {:?}, r_th = {:?} bit/s/Hz, gamma_th = {:?}",
        p.snr(),
        p.r_th,
        p.gamma_th()
    )
    .unwrap();
    writeln!(out, "{}", describe_support(&sup)).unwrap();
    match closed.threshold {
        crate::outage::ThresholdRadius::AlwaysServed => writeln!(out, "threshold radius: none (always served)"),
        crate::outage::ThresholdRadius::AlwaysOut => writeln!(out, "threshold radius: none (always out)"),
        crate::outage::ThresholdRadius::Radius(r) => writeln!(out, "threshold radius: {r:?} m"),
    }
    .unwrap();
    writeln!(out, "P_o = {:?} (branch {})", closed.probability, closed.branch).unwrap();
    if let Some(m) = mc {
        writeln!(
            out,
            "monte carlo: {:?} +/- {:?} ({} samples, seed {}), |diff| <= 3 sigma: {}",
            m.estimate,
            m.std_error,
            m.samples,
            m.seed,
            if m.agrees { "PASS" } else { "FAIL" }
        )
        .unwrap();
    }
    Ok((out, agrees))
}
