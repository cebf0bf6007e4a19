//! Scenario files.
//!
//! A scenario file is TOML. Lengths and powers are numbers in SI units or
//! strings with a unit suffix:
//!
//! ```toml
//! [scenario]
//! w_d = "2 cm"
//! alpha = "2 cm"
//! alpha_b = "1 cm"
//! r = "1 cm"
//!
//! [outage]          # optional
//! p_s = "10 mW"     # or snr_db = 10 (unit noise power)
//! n_o = "1 mW"
//! r_th = 2.0
//! a2 = "3 cm"       # optional upper support bound
//!
//! [quadrature]      # optional, defaults shown
//! abs_tol = 1e-10
//! rel_tol = 1e-10
//! max_subdivisions = 200
//!
//! [monte_carlo]     # optional, defaults shown
//! samples = 1000000
//! seed = 42
//! ```

use std::path::Path;

use serde::Deserialize;

use super::units::Quantity;
use super::CliError;
use crate::exact::QuadratureConfig;
use crate::geometry::{LinkScenario, Scenario};
use crate::oracles::McConfig;
use crate::outage::OutageParams;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    scenario: RawScenario,
    outage: Option<RawOutage>,
    #[serde(default)]
    quadrature: QuadratureConfig,
    #[serde(default)]
    monte_carlo: McConfig,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    w_d: Quantity,
    alpha: Quantity,
    #[serde(default = "zero")]
    alpha_b: Quantity,
    #[serde(default = "zero")]
    r: Quantity,
}

fn zero() -> Quantity {
    Quantity::Number(0.0)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutage {
    p_s: Option<Quantity>,
    n_o: Option<Quantity>,
    snr_db: Option<f64>,
    r_th: f64,
    a2: Option<Quantity>,
}

/// Everything a command needs, in SI units.
#[derive(Debug, Clone, PartialEq)]
pub struct Experiment {
    pub scenario: Scenario,
    pub outage: Option<OutageParams>,
    pub a2: Option<f64>,
    pub quadrature: QuadratureConfig,
    pub monte_carlo: McConfig,
}

fn field<T>(name: &str, r: Result<T, String>) -> Result<T, CliError> {
    r.map_err(|e| CliError::Parse(format!("{name}: {e}")))
}

/// Parses scenario-file text.
pub fn parse_experiment(text: &str) -> Result<Experiment, CliError> {
    let raw: RawFile = toml::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
    let link = LinkScenario {
        w_d: field("scenario.w_d", raw.scenario.w_d.length())?,
        alpha: field("scenario.alpha", raw.scenario.alpha.length())?,
        alpha_b: field("scenario.alpha_b", raw.scenario.alpha_b.length())?,
        r: field("scenario.r", raw.scenario.r.length())?,
    };
    let scenario = link.validate()?;
    raw.quadrature.check()?;
    raw.monte_carlo.check()?;

    let (outage, a2) = match raw.outage {
        None => (None, None),
        Some(o) => {
            let params = match (o.p_s, o.n_o, o.snr_db) {
                (Some(p), Some(n), None) => {
                    OutageParams::new(field("outage.p_s", p.power())?, field("outage.n_o", n.power())?, o.r_th)?
                }
                (None, None, Some(db)) => OutageParams::from_snr_db(db, o.r_th)?,
                _ => {
                    return Err(CliError::Parse(
                        "outage: give either both `p_s` and `n_o`, or `snr_db`".into(),
                    ))
                }
            };
            let a2 = o.a2.map(|q| field("outage.a2", q.length())).transpose()?;
            (Some(params), a2)
        }
    };

    Ok(Experiment {
        scenario,
        outage,
        a2,
        quadrature: raw.quadrature,
        monte_carlo: raw.monte_carlo,
    })
}

pub fn load_experiment(path: &Path) -> Result<Experiment, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => CliError::NotFound(path.display().to_string()),
        _ => CliError::Parse(format!("{}: {e}", path.display())),
    })?;
    parse_experiment(&text).map_err(|e| match e {
        CliError::Parse(msg) => CliError::Parse(format!("{}: {msg}", path.display())),
        other => other,
    })
}
