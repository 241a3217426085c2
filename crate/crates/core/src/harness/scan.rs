//! Two-dimensional fidelity scans. Cells are independent and run on a rayon
//! pool; results are collected in grid order so the output never depends on
//! scheduling.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{SystemConfig, SystemParams};
use super::run::run_config;
use super::{output, HarnessError};
use crate::error::ParamError;
use crate::propagator::Level;
use crate::units;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum AxisName {
    /// Peak Rabi frequency of the drive.
    Omega0,
    /// Decay rate of the excited state.
    Gamma,
    /// Single-photon detuning (three-level) or chirp parameter δ (two-level).
    Delta,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanAxis {
    pub name: AxisName,
    #[serde(deserialize_with = "units::frequency")]
    pub min: f64,
    #[serde(deserialize_with = "units::frequency")]
    pub max: f64,
    pub count: usize,
}

impl ScanAxis {
    pub fn values(&self) -> Vec<f64> {
        let n = self.count;
        (0..n)
            .map(|i| {
                if i + 1 == n {
                    self.max
                } else {
                    self.min + (self.max - self.min) * i as f64 / (n - 1) as f64
                }
            })
            .collect()
    }

    fn validate(&self) -> Result<(), ParamError> {
        if self.count < 2 {
            return Err(ParamError::new("count", "must be >= 2"));
        }
        if !(self.min.is_finite() && self.max.is_finite()) || self.min > self.max {
            return Err(ParamError::new("min", "must be finite and <= max"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ScanOutputs {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ScanSpec {
    pub axis1: ScanAxis,
    pub axis2: ScanAxis,
    pub base: SystemConfig,
    /// Defaults to the target of `base`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<Level>,
    /// Worker count; all logical CPUs when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    #[serde(default)]
    pub outputs: ScanOutputs,
}

impl ScanSpec {
    pub fn validate(&self) -> Result<(), ParamError> {
        self.axis1.validate().map_err(|e| e.within("axis1"))?;
        self.axis2.validate().map_err(|e| e.within("axis2"))?;
        self.base.validate().map_err(|e| e.within("base"))?;
        if let Some(t) = self.target {
            let dim = self.base.system.dimension();
            if !(1..=dim).contains(&t.0) {
                return Err(ParamError::new("target", format!("must be a level in 1..={dim}")));
            }
        }
        if self.threads == Some(0) {
            return Err(ParamError::new("threads", "must be >= 1"));
        }
        Ok(())
    }

    pub fn target(&self) -> Level {
        self.target.unwrap_or_else(|| self.base.target())
    }

    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        let spec: ScanSpec = serde_json::from_str(text).map_err(HarnessError::Parse)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scan configuration serializes")
    }
}

/// Set one scanned parameter on a copy of the base configuration.
pub fn apply_axis(cfg: &mut SystemConfig, name: AxisName, value: f64) {
    match (&mut cfg.system, name) {
        (SystemParams::TwoLevel(p), AxisName::Omega0) => p.pulse.omega0 = value,
        (SystemParams::TwoLevel(p), AxisName::Gamma) => p.gamma = value,
        (SystemParams::TwoLevel(p), AxisName::Delta) => p.pulse.delta = value,
        (SystemParams::ThreeLevel(p), AxisName::Omega0) => p.pulses.omega0 = value,
        (SystemParams::ThreeLevel(p), AxisName::Gamma) => p.gamma = value,
        (SystemParams::ThreeLevel(p), AxisName::Delta) => {
            p.delta_p = value;
            p.delta_s = value;
        }
        (SystemParams::EffectiveTwoLevel(p), AxisName::Omega0) => p.base.pulses.omega0 = value,
        (SystemParams::EffectiveTwoLevel(p), AxisName::Gamma) => p.base.gamma = value,
        (SystemParams::EffectiveTwoLevel(p), AxisName::Delta) => {
            p.base.delta_p = value;
            p.base.delta_s = value;
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanResult {
    pub axis1: Vec<f64>,
    pub axis2: Vec<f64>,
    /// Row-major, `axis1` outermost. `NaN` marks a failed cell.
    pub fidelity: Vec<f64>,
    /// One line per failed cell.
    pub failures: Vec<String>,
}

impl ScanResult {
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.fidelity[i * self.axis2.len() + j]
    }

    /// Smallest fidelity over the successful cells.
    pub fn min(&self) -> f64 {
        self.fidelity
            .iter()
            .copied()
            .filter(|f| !f.is_nan())
            .fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.fidelity
            .iter()
            .copied()
            .filter(|f| !f.is_nan())
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn to_csv(&self) -> Result<String, HarnessError> {
        output::scan_csv(&self.axis1, &self.axis2, &self.fidelity)
    }

    pub fn summary_json(&self) -> serde_json::Value {
        let finite = |x: f64| {
            if x.is_finite() {
                serde_json::json!(x)
            } else {
                serde_json::Value::Null
            }
        };
        serde_json::json!({
            "cells": self.fidelity.len(),
            "failedCells": self.failures.len(),
            "minFidelity": finite(self.min()),
            "maxFidelity": finite(self.max()),
        })
    }
}

fn scan_cells(spec: &ScanSpec, a1: &[f64], a2: &[f64]) -> Vec<(f64, Option<String>)> {
    let target = spec.target();
    let cells: Vec<(f64, f64)> = a1.iter().flat_map(|&x| a2.iter().map(move |&y| (x, y))).collect();
    cells
        .par_iter()
        .map(|&(x, y)| {
            let mut cfg = spec.base.clone();
            apply_axis(&mut cfg, spec.axis1.name, x);
            apply_axis(&mut cfg, spec.axis2.name, y);
            cfg.integrator.max_rows = 2;
            match run_config(&cfg) {
                Ok(r) => (r.trajectory.fidelity(target).unwrap_or(f64::NAN), None),
                Err(e) => (
                    f64::NAN,
                    Some(format!("axis1={},axis2={}: {e}", output::fmt(x), output::fmt(y))),
                ),
            }
        })
        .collect()
}

/// Evaluate the fidelity on every grid cell. Failing cells become `NaN`.
pub fn run_scan(spec: &ScanSpec) -> Result<ScanResult, HarnessError> {
    spec.validate()?;
    let a1 = spec.axis1.values();
    let a2 = spec.axis2.values();
    let cells = match spec.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| HarnessError::Validation(ParamError::new("threads", e.to_string())))?
            .install(|| scan_cells(spec, &a1, &a2)),
        None => scan_cells(spec, &a1, &a2),
    };
    let mut fidelity = Vec::with_capacity(cells.len());
    let mut failures = Vec::new();
    for (f, err) in cells {
        fidelity.push(f);
        if let Some(e) = err {
            log::warn!("scan cell failed: {e}");
            failures.push(e);
        }
    }
    Ok(ScanResult {
        axis1: a1,
        axis2: a2,
        fidelity,
        failures,
    })
}

/// Write the grid CSV and, when cells failed, a `.log` sidecar next to it.
pub fn write_scan(result: &ScanResult, csv_path: &Path) -> Result<(), HarnessError> {
    output::write(csv_path, &result.to_csv()?)?;
    let log_path = csv_path.with_extension("log");
    if !result.failures.is_empty() {
        let mut text = result.failures.join("\n");
        text.push('\n');
        output::write(&log_path, &text)?;
    } else if log_path.exists() {
        std::fs::remove_file(&log_path).map_err(|e| HarnessError::io(&log_path, e))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::CdKind;
    use crate::harness::presets::{preset, PresetSpec};
    use crate::units::two_pi_mhz;

    fn fig4b_small(count: usize) -> ScanSpec {
        let PresetSpec::Scan(mut spec) = preset("fig4b").unwrap().spec else {
            panic!("fig4b is a scan")
        };
        spec.axis1.count = count;
        spec.axis2.count = count;
        spec.base.integrator.min_steps = 1500;
        spec
    }

    #[test]
    fn axis_values_hit_both_ends() {
        let a = ScanAxis {
            name: AxisName::Gamma,
            min: 1.0,
            max: 2.0,
            count: 5,
        };
        assert_eq!(a.values(), vec![1.0, 1.25, 1.5, 1.75, 2.0]);
    }

    #[test]
    fn degenerate_grid_repeats_one_value() {
        let mut spec = fig4b_small(2);
        spec.axis1.max = spec.axis1.min;
        spec.axis2.max = spec.axis2.min;
        let r = run_scan(&spec).unwrap();
        assert_eq!(r.fidelity.len(), 4);
        assert!(r.fidelity.iter().all(|&f| f == r.fidelity[0]));
    }

    #[test]
    fn failing_cells_become_nan_and_are_logged() {
        let mut spec = fig4b_small(2);
        // an explicit step that is too coarse for the larger Rabi frequency
        spec.axis1.max = two_pi_mhz(800.0);
        spec.axis2.max = spec.axis2.min;
        spec.base.integrator.dt = Some(6e-11);
        let r = run_scan(&spec).unwrap();
        assert!(r.fidelity.iter().any(|f| f.is_nan()));
        assert!(r.fidelity.iter().any(|f| !f.is_nan()));
        assert_eq!(r.failures.len(), r.fidelity.iter().filter(|f| f.is_nan()).count());

        let dir = tempfile::tempdir().unwrap();
        let csv = dir.path().join("grid.csv");
        write_scan(&r, &csv).unwrap();
        let log = std::fs::read_to_string(dir.path().join("grid.log")).unwrap();
        assert_eq!(log.lines().count(), r.failures.len());
        assert!(std::fs::read_to_string(&csv).unwrap().contains("NaN"));
    }

    #[test]
    fn thread_count_does_not_change_results() {
        let mut spec = fig4b_small(3);
        spec.threads = Some(1);
        let one = run_scan(&spec).unwrap();
        spec.threads = Some(4);
        let four = run_scan(&spec).unwrap();
        assert_eq!(one.to_csv().unwrap(), four.to_csv().unwrap());
    }

    #[test]
    fn validation() {
        let mut spec = fig4b_small(2);
        spec.axis2.count = 1;
        assert_eq!(spec.validate().unwrap_err().field, "axis2.count");
        let mut spec = fig4b_small(2);
        spec.base.cd = CdKind::BeyondRwa;
        assert_eq!(spec.validate().unwrap_err().field, "base.cd");
    }

    #[test]
    fn spec_round_trip() {
        let spec = fig4b_small(4);
        assert_eq!(ScanSpec::from_json(&spec.to_json()).unwrap(), spec);
    }
}
