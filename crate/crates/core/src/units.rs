//! Unit handling for configuration values.
//!
//! Internally every frequency is an angular frequency in rad/s and every time
//! is in seconds. Configuration files may give either a bare number in those
//! units or a `{"value": .., "unit": ".."}` object, e.g.
//! `{"value": 5, "unit": "2pi*MHz"}` for 2π × 5 MHz.

use std::f64::consts::TAU;

use serde::{Deserialize, Deserializer};

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum Quantity {
    Raw(f64),
    Tagged { value: f64, unit: String },
}

/// Multiplier converting `unit` to rad/s.
pub fn frequency_factor(unit: &str) -> Option<f64> {
    let u = unit.trim().replace(' ', "");
    let (two_pi, rest) = match u.strip_prefix("2pi*").or_else(|| u.strip_prefix("2π*")) {
        Some(r) => (TAU, r.to_string()),
        None => (1.0, u.clone()),
    };
    let scale = match rest.as_str() {
        "rad/s" if two_pi == 1.0 => 1.0,
        "Hz" => 1.0,
        "kHz" => 1e3,
        "MHz" => 1e6,
        "GHz" => 1e9,
        "THz" => 1e12,
        _ => return None,
    };
    Some(two_pi * scale)
}

/// Multiplier converting `unit` to seconds.
pub fn time_factor(unit: &str) -> Option<f64> {
    Some(match unit.trim() {
        "s" => 1.0,
        "ms" => 1e-3,
        "us" | "µs" => 1e-6,
        "ns" => 1e-9,
        "ps" => 1e-12,
        "fs" => 1e-15,
        _ => return None,
    })
}

fn convert<'de, D: Deserializer<'de>>(d: D, factor: fn(&str) -> Option<f64>, kind: &str) -> Result<f64, D::Error> {
    match Quantity::deserialize(d)? {
        Quantity::Raw(v) => Ok(v),
        Quantity::Tagged { value, unit } => factor(&unit)
            .map(|f| value * f)
            .ok_or_else(|| serde::de::Error::custom(format!("unknown {kind} unit `{unit}`"))),
    }
}

/// Deserialize a frequency given in rad/s or as a tagged quantity.
pub fn frequency<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    convert(d, frequency_factor, "frequency")
}

/// Deserialize a time given in seconds or as a tagged quantity.
pub fn time<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    convert(d, time_factor, "time")
}

/// 2π × `mhz` MHz in rad/s.
pub fn two_pi_mhz(mhz: f64) -> f64 {
    TAU * mhz * 1e6
}

/// 2π × `ghz` GHz in rad/s.
pub fn two_pi_ghz(ghz: f64) -> f64 {
    TAU * ghz * 1e9
}
