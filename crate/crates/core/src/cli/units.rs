//! Quantities with unit suffixes, normalized to SI on ingest.

use serde::Deserialize;

/// A number in SI units, or a string such as `"2.5 cm"`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Quantity {
    Number(f64),
    Text(String),
}

fn split_suffix(text: &str) -> (&str, &str) {
    let t = text.trim();
    let num = t.trim_end_matches(|c: char| c.is_ascii_alphabetic());
    (num.trim(), &t[num.len()..])
}

fn parse_with(text: &str, kind: &str, units: &[(&str, f64)]) -> Result<f64, String> {
    let (num, unit) = split_suffix(text);
    let value: f64 = num
        .parse()
        .map_err(|_| format!("cannot read a number from {kind} `{text}`"))?;
    let scale = units.iter().find(|(u, _)| *u == unit).map(|&(_, s)| s).ok_or_else(|| {
        let known: Vec<&str> = units.iter().map(|(u, _)| *u).filter(|u| !u.is_empty()).collect();
        format!(
            "unknown {kind} unit `{unit}` in `{text}` (expected one of {})",
            known.join(", ")
        )
    })?;
    Ok(value * scale)
}

const LENGTH_UNITS: [(&str, f64); 5] = [("", 1.0), ("m", 1.0), ("cm", 1e-2), ("mm", 1e-3), ("um", 1e-6)];

const POWER_UNITS: [(&str, f64); 5] = [("", 1.0), ("W", 1.0), ("mW", 1e-3), ("uW", 1e-6), ("nW", 1e-9)];

/// Length in meters. Bare numbers are meters.
pub fn parse_length(text: &str) -> Result<f64, String> {
    parse_with(text, "length", &LENGTH_UNITS)
}

/// Power in watts. Bare numbers are watts; `dBm` is accepted.
pub fn parse_power(text: &str) -> Result<f64, String> {
    let (num, unit) = split_suffix(text);
    if unit == "dBm" {
        let dbm: f64 = num
            .parse()
            .map_err(|_| format!("cannot read a number from power `{text}`"))?;
        return Ok(1e-3 * 10f64.powf(dbm / 10.0));
    }
    parse_with(text, "power", &POWER_UNITS)
}

impl Quantity {
    pub fn length(&self) -> Result<f64, String> {
        match self {
            Quantity::Number(v) => Ok(*v),
            Quantity::Text(t) => parse_length(t),
        }
    }

    pub fn power(&self) -> Result<f64, String> {
        match self {
            Quantity::Number(v) => Ok(*v),
            Quantity::Text(t) => parse_power(t),
        }
    }
}
