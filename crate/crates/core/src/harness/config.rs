use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::effective::EffectiveParams;
use crate::error::ParamError;
use crate::propagator::{IntegratorSpec, Level};
use crate::three_level::ThreeLevelParams;
use crate::two_level::TwoLevelParams;

/// Which model to propagate, with its parameters.
///
/// Serialized as `"system": "twoLevel", "params": {...}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "system", content = "params", rename_all = "camelCase")]
pub enum SystemParams {
    TwoLevel(TwoLevelParams),
    ThreeLevel(ThreeLevelParams),
    EffectiveTwoLevel(EffectiveParams),
}

impl SystemParams {
    pub fn dimension(&self) -> usize {
        match self {
            SystemParams::ThreeLevel(_) => 3,
            _ => 2,
        }
    }

    pub fn final_time(&self) -> f64 {
        match self {
            SystemParams::TwoLevel(p) => p.pulse.tf,
            SystemParams::ThreeLevel(p) => p.pulses.tf,
            SystemParams::EffectiveTwoLevel(p) => p.base.pulses.tf,
        }
    }

    /// Level reached by a complete transfer.
    pub fn default_target(&self) -> Level {
        match self {
            SystemParams::ThreeLevel(_) => Level(3),
            _ => Level(2),
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            SystemParams::TwoLevel(_) => "twoLevel",
            SystemParams::ThreeLevel(_) => "threeLevel",
            SystemParams::EffectiveTwoLevel(_) => "effectiveTwoLevel",
        }
    }

    pub fn validate(&self) -> Result<(), ParamError> {
        match self {
            SystemParams::TwoLevel(p) => p.validate(),
            SystemParams::ThreeLevel(p) => p.validate(),
            SystemParams::EffectiveTwoLevel(p) => p.validate(),
        }
        .map_err(|e| e.within("params"))
    }
}

/// Counterdiabatic term added to the reference Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum CdKind {
    #[serde(alias = "None")]
    None,
    #[serde(alias = "RWA")]
    Rwa,
    #[serde(alias = "BeyondRWA")]
    BeyondRwa,
    #[serde(alias = "ProjectorFormula")]
    ProjectorFormula,
    /// Accepted for three-level runs; propagation uses the projector sum and
    /// reports the largest disagreement with the closed form.
    #[serde(alias = "ClosedForm")]
    ClosedForm,
    #[serde(alias = "EffectiveCD")]
    EffectiveCd,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Outputs {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trajectory: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub summary: Option<PathBuf>,
}

fn first_level() -> Level {
    Level(1)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SystemConfig {
    #[serde(flatten)]
    pub system: SystemParams,
    pub cd: CdKind,
    /// Two-level RWA correction only: keep `i·Im Ω_a`.
    #[serde(default)]
    pub imag_only: bool,
    #[serde(default)]
    pub integrator: IntegratorSpec,
    #[serde(default = "first_level")]
    pub initial_state: Level,
    /// Defaults to the transfer target of the system.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<Level>,
    #[serde(default)]
    pub outputs: Outputs,
}

impl SystemConfig {
    pub fn new(system: SystemParams, cd: CdKind) -> Self {
        SystemConfig {
            system,
            cd,
            imag_only: false,
            integrator: IntegratorSpec::default(),
            initial_state: Level(1),
            target: None,
            outputs: Outputs::default(),
        }
    }

    pub fn target(&self) -> Level {
        self.target.unwrap_or_else(|| self.system.default_target())
    }

    pub fn validate(&self) -> Result<(), ParamError> {
        self.system.validate()?;
        self.integrator.validate().map_err(|e| e.within("integrator"))?;

        let allowed: &[CdKind] = match self.system {
            SystemParams::TwoLevel(_) => &[CdKind::None, CdKind::Rwa, CdKind::BeyondRwa],
            SystemParams::ThreeLevel(_) => &[CdKind::None, CdKind::Rwa, CdKind::ProjectorFormula, CdKind::ClosedForm],
            SystemParams::EffectiveTwoLevel(_) => &[CdKind::None, CdKind::EffectiveCd],
        };
        if !allowed.contains(&self.cd) {
            return Err(ParamError::new(
                "cd",
                format!("{:?} is not available for {} systems", self.cd, self.system.kind()),
            ));
        }
        if self.imag_only && !(matches!(self.system, SystemParams::TwoLevel(_)) && self.cd == CdKind::Rwa) {
            return Err(ParamError::new(
                "imagOnly",
                "only applies to two-level runs with the RWA correction",
            ));
        }

        let dim = self.system.dimension();
        if !(1..=dim).contains(&self.initial_state.0) {
            return Err(ParamError::new("initialState", format!("must be a level in 1..={dim}")));
        }
        if let Some(t) = self.target {
            if !(1..=dim).contains(&t.0) {
                return Err(ParamError::new("target", format!("must be a level in 1..={dim}")));
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        let cfg: SystemConfig = serde_json::from_str(text).map_err(HarnessError::Parse)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("configuration serializes")
    }
}
