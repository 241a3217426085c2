use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};

use super::config::{CdKind, SystemConfig, SystemParams};
use super::{output, HarnessError};
use crate::effective::EffectiveSystem;
use crate::linalg::norm_sqr;
use crate::propagator::{dark_state_overlap, evolve, fidelity, populations, Level, Trajectory};
use crate::three_level::{self, ThreeLevelCd, ThreeLevelParams, ThreeLevelSystem, XI0_CUTOFF};
use crate::two_level::{self, TwoLevelCd, TwoLevelParams, TwoLevelSystem};

/// A two- or three-component trajectory.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyTrajectory {
    Two(Trajectory<2>),
    Three(Trajectory<3>),
}

impl AnyTrajectory {
    pub fn times(&self) -> &[f64] {
        match self {
            AnyTrajectory::Two(t) => &t.times,
            AnyTrajectory::Three(t) => &t.times,
        }
    }

    /// Rows of `|c_i|²`.
    pub fn populations(&self) -> Vec<Vec<f64>> {
        match self {
            AnyTrajectory::Two(t) => populations(t).into_iter().map(|p| p.to_vec()).collect(),
            AnyTrajectory::Three(t) => populations(t).into_iter().map(|p| p.to_vec()).collect(),
        }
    }

    pub fn norms(&self) -> Vec<f64> {
        match self {
            AnyTrajectory::Two(t) => t.states.iter().map(|s| norm_sqr(s).sqrt()).collect(),
            AnyTrajectory::Three(t) => t.states.iter().map(|s| norm_sqr(s).sqrt()).collect(),
        }
    }

    pub fn fidelity(&self, target: Level) -> Option<f64> {
        match self {
            AnyTrajectory::Two(t) => fidelity(t, target),
            AnyTrajectory::Three(t) => fidelity(t, target),
        }
    }

    pub fn min_norm(&self) -> f64 {
        match self {
            AnyTrajectory::Two(t) => t.min_norm,
            AnyTrajectory::Three(t) => t.min_norm,
        }
    }

    pub fn steps(&self) -> usize {
        match self {
            AnyTrajectory::Two(t) => t.steps,
            AnyTrajectory::Three(t) => t.steps,
        }
    }

    pub fn to_csv(&self) -> Result<String, HarnessError> {
        match self {
            AnyTrajectory::Two(t) => output::trajectory_csv(t),
            AnyTrajectory::Three(t) => output::trajectory_csv(t),
        }
    }
}

/// One JSON object summarizing a run.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Summary {
    pub preset: Option<String>,
    pub fidelity: f64,
    pub final_populations: Vec<f64>,
    pub min_norm: f64,
    pub max_cd_discrepancy: Option<f64>,
    #[serde(flatten)]
    pub extra: BTreeMap<String, Value>,
}

impl Summary {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("summary serializes")
    }
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub trajectory: AnyTrajectory,
    pub summary: Summary,
}

fn two_level_cd(cfg: &SystemConfig) -> TwoLevelCd {
    match cfg.cd {
        CdKind::Rwa => TwoLevelCd::Rwa {
            imag_only: cfg.imag_only,
        },
        CdKind::BeyondRwa => TwoLevelCd::BeyondRwa,
        _ => TwoLevelCd::None,
    }
}

fn three_level_cd(cd: CdKind) -> ThreeLevelCd {
    match cd {
        CdKind::Rwa => ThreeLevelCd::Rwa,
        CdKind::ProjectorFormula => ThreeLevelCd::Projector,
        CdKind::ClosedForm => {
            log::warn!("closed-form counterdiabatic term requested; propagating with the projector sum instead");
            ThreeLevelCd::Projector
        }
        _ => ThreeLevelCd::None,
    }
}

/// Largest relative difference between the closed-form two-level correction
/// and the one assembled from the eigenstates.
pub fn two_level_cd_discrepancy(times: &[f64], p: &TwoLevelParams) -> Result<f64, HarnessError> {
    let w = p.phase_frequency();
    let mut worst = 0.0f64;
    for &t in times {
        let beta = two_level::mixing_angle(t, p, None)?;
        let general = two_level::cd_general(
            &two_level::eigenstates(&beta, w, t),
            &two_level::eigenstate_derivatives(&beta, w, t),
        );
        worst = worst.max(two_level::cd_beyond_rwa(&beta, w, t).rel_diff(&general));
    }
    Ok(worst)
}

/// Largest relative difference between the closed-form and projector-sum
/// three-level corrections, skipping times where the pulses are off.
pub fn three_level_cd_discrepancy(times: &[f64], p: &ThreeLevelParams) -> Result<f64, HarnessError> {
    let mut worst = 0.0f64;
    for &t in times {
        if three_level::xi0(t, p) < XI0_CUTOFF * p.pulses.omega0 {
            continue;
        }
        let es = three_level::eigensystem(t, p)?;
        let closed = three_level::cd_closed_form(t, p, &es);
        let projector = three_level::cd_projector(t, p)?;
        if closed.is_finite() && projector.is_finite() {
            worst = worst.max(closed.rel_diff(&projector));
        }
    }
    Ok(worst)
}

fn max_columns(rows: &[Vec<f64>]) -> Vec<f64> {
    let n = rows.first().map_or(0, Vec::len);
    (0..n)
        .map(|i| rows.iter().map(|r| r[i]).fold(f64::NEG_INFINITY, f64::max))
        .collect()
}

/// Propagate the configured system and summarize the outcome.
pub fn run_config(cfg: &SystemConfig) -> Result<RunResult, HarnessError> {
    cfg.validate()?;
    let tf = cfg.system.final_time();
    let mut extra = BTreeMap::new();
    let mut discrepancy = None;

    let trajectory = match cfg.system {
        SystemParams::TwoLevel(p) => {
            let sys = TwoLevelSystem {
                params: p,
                cd: two_level_cd(cfg),
            };
            let tr = evolve(
                &sys,
                cfg.initial_state.basis::<2>().expect("validated"),
                tf,
                &cfg.integrator,
            )?;
            if cfg.cd == CdKind::BeyondRwa {
                discrepancy = Some(two_level_cd_discrepancy(&tr.times, &p)?);
            }
            AnyTrajectory::Two(tr)
        }
        SystemParams::ThreeLevel(p) => {
            let sys = ThreeLevelSystem {
                params: p,
                cd: three_level_cd(cfg.cd),
            };
            let tr = evolve(
                &sys,
                cfg.initial_state.basis::<3>().expect("validated"),
                tf,
                &cfg.integrator,
            )?;
            if matches!(cfg.cd, CdKind::ProjectorFormula | CdKind::ClosedForm) {
                let d = three_level_cd_discrepancy(&tr.times, &p)?;
                if d > 1e-6 {
                    log::warn!("closed-form and projector-sum corrections differ by up to {d:.3e} (relative)");
                }
                discrepancy = Some(d);
            }
            if let Ok(overlap) = dark_state_overlap(&tr, &p) {
                extra.insert(
                    "minDarkOverlap".into(),
                    json!(overlap.iter().copied().fold(f64::INFINITY, f64::min)),
                );
            }
            AnyTrajectory::Three(tr)
        }
        SystemParams::EffectiveTwoLevel(p) => {
            let sys = EffectiveSystem {
                params: p,
                with_cd: cfg.cd == CdKind::EffectiveCd,
            };
            let tr = evolve(
                &sys,
                cfg.initial_state.basis::<2>().expect("validated"),
                tf,
                &cfg.integrator,
            )?;
            AnyTrajectory::Two(tr)
        }
    };

    let pops = trajectory.populations();
    let norms = trajectory.norms();
    let monotone = norms.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12));
    extra.insert("maxPopulations".into(), json!(max_columns(&pops)));
    extra.insert("normMonotone".into(), json!(monotone));
    extra.insert("steps".into(), json!(trajectory.steps()));

    let summary = Summary {
        preset: None,
        fidelity: trajectory.fidelity(cfg.target()).expect("validated"),
        final_populations: pops.last().cloned().unwrap_or_default(),
        min_norm: trajectory.min_norm(),
        max_cd_discrepancy: discrepancy,
        extra,
    };
    Ok(RunResult { trajectory, summary })
}

/// Write the trajectory and summary wherever `cfg.outputs` points, with
/// `fallback_csv` used when no trajectory path is configured.
pub fn write_run(cfg: &SystemConfig, result: &RunResult, fallback_csv: Option<&Path>) -> Result<(), HarnessError> {
    if let Some(path) = cfg.outputs.trajectory.as_deref().or(fallback_csv) {
        output::write(path, &result.trajectory.to_csv()?)?;
    }
    if let Some(path) = &cfg.outputs.summary {
        output::write(path, &result.summary.to_json())?;
    }
    Ok(())
}
