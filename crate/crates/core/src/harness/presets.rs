//! Named parameter sets, one per preset id.

use std::collections::BTreeMap;
use std::path::Path;

use serde_json::{json, Value};

use super::config::{CdKind, SystemConfig, SystemParams};
use super::run::{run_config, RunResult};
use super::scan::{run_scan, write_scan, AxisName, ScanAxis, ScanSpec};
use super::{output, HarnessError};
use crate::effective::{EffectiveParams, EliminationVariant};
use crate::propagator::IntegratorSpec;
use crate::pulses::{AeParams, GaussianPairParams};
use crate::three_level::ThreeLevelParams;
use crate::two_level::{cd_rwa, TwoLevelParams};
use crate::units::{two_pi_ghz, two_pi_mhz};

pub const PRESET_IDS: [&str; 12] = [
    "fig1", "fig2a", "fig2b", "fig2c", "fig3a", "fig3b", "fig4a", "fig4b", "fig4c", "fig4d", "fig5a", "fig5b",
];

/// Cells per axis of the figure-4 presets.
pub const SCAN_POINTS: usize = 11;

#[derive(Debug, Clone, PartialEq)]
pub enum PresetSpec {
    /// A single propagation.
    Run(SystemConfig),
    /// RWA correction with the full auxiliary field and with its imaginary
    /// part only, plus the field itself.
    AuxiliaryField(SystemConfig),
    Scan(ScanSpec),
    /// Effective model against the full Λ system; `show_effective` selects
    /// which trajectory is written.
    Elimination {
        effective: SystemConfig,
        three_level: SystemConfig,
        show_effective: bool,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Preset {
    pub id: &'static str,
    pub description: &'static str,
    pub spec: PresetSpec,
}

/// Allen-Eberly two-level drive: Γ = 2π×0.5 MHz, Ω₀ = 2π×5 MHz,
/// δ = 2π×300 MHz, t_f = 0.2 ns, t₀ = 0.1 ns, ω_L = 2π×10 GHz.
pub fn two_level_params(counter_rotating: bool) -> TwoLevelParams {
    TwoLevelParams {
        gamma: two_pi_mhz(0.5),
        omega_l: two_pi_ghz(10.0),
        pulse: AeParams {
            omega0: two_pi_mhz(5.0),
            delta: two_pi_mhz(300.0),
            t0: 1e-10,
            tf: 2e-10,
        },
        counter_rotating,
    }
}

/// Λ system: t_f = 30 ns, T = t_f/6, τ = t_f/10, Ω₀ = Δ = 2π×200 MHz,
/// Γ = 2π×100 MHz, carriers ω_p = 1e8 rad/s and ω_s = 8e7 rad/s.
pub fn three_level_params() -> ThreeLevelParams {
    ThreeLevelParams {
        gamma: two_pi_mhz(100.0),
        delta_p: two_pi_mhz(200.0),
        delta_s: two_pi_mhz(200.0),
        omega_p: 1e8,
        omega_s: 8e7,
        pulses: GaussianPairParams::standard(two_pi_mhz(200.0), 30e-9),
        counter_rotating: true,
    }
}

/// Far-detuned Λ system: Ω₀ = Γ = 2π×0.16 GHz, Δ = 2π×2.5 GHz,
/// ω_p = 0.1e9 rad/s, ω_s = 0.08e9 rad/s.
pub fn far_detuned_params() -> ThreeLevelParams {
    ThreeLevelParams {
        gamma: two_pi_ghz(0.16),
        delta_p: two_pi_ghz(2.5),
        delta_s: two_pi_ghz(2.5),
        omega_p: 0.1e9,
        omega_s: 0.08e9,
        pulses: GaussianPairParams::standard(two_pi_ghz(0.16), 30e-9),
        counter_rotating: true,
    }
}

fn scan_integrator() -> IntegratorSpec {
    IntegratorSpec {
        min_steps: 4000,
        ..IntegratorSpec::default()
    }
}

fn fig4(axis1: AxisName, cd: CdKind) -> ScanSpec {
    let mut base = SystemConfig::new(SystemParams::ThreeLevel(three_level_params()), cd);
    base.integrator = scan_integrator();
    ScanSpec {
        axis1: ScanAxis {
            name: axis1,
            min: two_pi_mhz(100.0),
            max: two_pi_mhz(800.0),
            count: SCAN_POINTS,
        },
        axis2: ScanAxis {
            name: AxisName::Gamma,
            min: two_pi_mhz(100.0),
            max: two_pi_mhz(600.0),
            count: SCAN_POINTS,
        },
        base,
        target: None,
        threads: None,
        outputs: Default::default(),
    }
}

fn elimination(show_effective: bool) -> PresetSpec {
    PresetSpec::Elimination {
        effective: SystemConfig::new(
            SystemParams::EffectiveTwoLevel(EffectiveParams {
                base: far_detuned_params(),
                variant: EliminationVariant::default(),
            }),
            CdKind::EffectiveCd,
        ),
        three_level: SystemConfig::new(SystemParams::ThreeLevel(far_detuned_params()), CdKind::ProjectorFormula),
        show_effective,
    }
}

pub fn preset(id: &str) -> Result<Preset, HarnessError> {
    let two = |cr: bool, cd: CdKind| SystemConfig::new(SystemParams::TwoLevel(two_level_params(cr)), cd);
    let three = |cd: CdKind| SystemConfig::new(SystemParams::ThreeLevel(three_level_params()), cd);
    let (id, description, spec) = match id {
        "fig1" => (
            "fig1",
            "auxiliary field and transfer with the full and imaginary-only RWA correction",
            PresetSpec::AuxiliaryField(two(false, CdKind::Rwa)),
        ),
        "fig2a" => (
            "fig2a",
            "RWA reference with RWA correction",
            PresetSpec::Run(two(false, CdKind::Rwa)),
        ),
        "fig2b" => (
            "fig2b",
            "counter-rotating reference with the RWA correction",
            PresetSpec::Run(two(true, CdKind::Rwa)),
        ),
        "fig2c" => (
            "fig2c",
            "counter-rotating reference with the beyond-RWA correction",
            PresetSpec::Run(two(true, CdKind::BeyondRwa)),
        ),
        "fig3a" => (
            "fig3a",
            "Λ system with counter-rotating terms and the RWA correction",
            PresetSpec::Run(three(CdKind::Rwa)),
        ),
        "fig3b" => (
            "fig3b",
            "Λ system with counter-rotating terms and the projector-sum correction",
            PresetSpec::Run(three(CdKind::ProjectorFormula)),
        ),
        "fig4a" => (
            "fig4a",
            "fidelity over (Ω₀, Γ) with the RWA correction",
            PresetSpec::Scan(fig4(AxisName::Omega0, CdKind::Rwa)),
        ),
        "fig4b" => (
            "fig4b",
            "fidelity over (Ω₀, Γ) with the projector-sum correction",
            PresetSpec::Scan(fig4(AxisName::Omega0, CdKind::ProjectorFormula)),
        ),
        "fig4c" => (
            "fig4c",
            "fidelity over (Δ, Γ) with the RWA correction",
            PresetSpec::Scan(fig4(AxisName::Delta, CdKind::Rwa)),
        ),
        "fig4d" => (
            "fig4d",
            "fidelity over (Δ, Γ) with the projector-sum correction",
            PresetSpec::Scan(fig4(AxisName::Delta, CdKind::ProjectorFormula)),
        ),
        "fig5a" => (
            "fig5a",
            "effective two-level model after elimination",
            elimination(true),
        ),
        "fig5b" => ("fig5b", "full Λ system at large detuning", elimination(false)),
        other => return Err(HarnessError::UnknownPreset(other.to_string())),
    };
    Ok(Preset { id, description, spec })
}

/// Overrides applied to every run of a preset.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PresetOptions {
    pub threads: Option<usize>,
    pub dt: Option<f64>,
}

impl PresetOptions {
    fn apply(&self, cfg: &mut SystemConfig) {
        if let Some(dt) = self.dt {
            cfg.integrator.dt = Some(dt);
        }
    }
}

/// Largest `|P_1^{eff} − P_1|` and `|P_2^{eff} − P_3|` over the shared grid.
pub fn population_deviation(effective: &RunResult, three_level: &RunResult) -> Result<(f64, f64), HarnessError> {
    if effective.trajectory.times() != three_level.trajectory.times() {
        return Err(HarnessError::Validation(crate::ParamError::new(
            "integrator",
            "effective and three-level runs must share one time grid",
        )));
    }
    let (e, f) = (effective.trajectory.populations(), three_level.trajectory.populations());
    let mut d = (0.0f64, 0.0f64);
    for (a, b) in e.iter().zip(&f) {
        d.0 = d.0.max((a[0] - b[0]).abs());
        d.1 = d.1.max((a[1] - b[2]).abs());
    }
    Ok(d)
}

/// Both elimination variants against the full Λ system.
pub struct EliminationReport {
    pub three_level: RunResult,
    pub effective: BTreeMap<&'static str, (RunResult, (f64, f64))>,
}

pub fn compare_elimination(
    effective: &SystemConfig,
    three_level: &SystemConfig,
) -> Result<EliminationReport, HarnessError> {
    let full = run_config(three_level)?;
    let mut out = BTreeMap::new();
    for (name, variant) in [
        ("asPrinted", EliminationVariant::AsPrinted),
        ("standardElimination", EliminationVariant::StandardElimination),
    ] {
        let mut cfg = effective.clone();
        if let SystemParams::EffectiveTwoLevel(p) = &mut cfg.system {
            p.variant = variant;
        }
        let r = run_config(&cfg)?;
        let d = population_deviation(&r, &full)?;
        out.insert(name, (r, d));
    }
    Ok(EliminationReport {
        three_level: full,
        effective: out,
    })
}

fn variant_name(cfg: &SystemConfig) -> &'static str {
    match cfg.system {
        SystemParams::EffectiveTwoLevel(EffectiveParams {
            variant: EliminationVariant::AsPrinted,
            ..
        }) => "asPrinted",
        _ => "standardElimination",
    }
}

/// Run a preset, write `<id>.csv` (plus extra CSVs for some presets) and
/// `<id>.summary.json` into `out_dir`, and return the summary.
pub fn run_preset(id: &str, out_dir: &Path, opts: &PresetOptions) -> Result<Value, HarnessError> {
    let preset = preset(id)?;
    let csv_path = out_dir.join(format!("{}.csv", preset.id));
    let mut summary = match preset.spec {
        PresetSpec::Run(mut cfg) => {
            opts.apply(&mut cfg);
            let r = run_config(&cfg)?;
            output::write(&csv_path, &r.trajectory.to_csv()?)?;
            serde_json::to_value(&r.summary).expect("summary serializes")
        }
        PresetSpec::AuxiliaryField(mut cfg) => {
            opts.apply(&mut cfg);
            let full = run_config(&cfg)?;
            let mut imag = cfg.clone();
            imag.imag_only = true;
            let imag = run_config(&imag)?;
            output::write(&csv_path, &full.trajectory.to_csv()?)?;
            output::write(&out_dir.join("fig1_imag_only.csv"), &imag.trajectory.to_csv()?)?;

            let SystemParams::TwoLevel(p) = cfg.system else {
                unreachable!("fig1 is a two-level preset")
            };
            let n = 1000;
            let times: Vec<f64> = (0..=n).map(|k| p.pulse.tf * k as f64 / n as f64).collect();
            let mut re = Vec::with_capacity(times.len());
            let mut im = Vec::with_capacity(times.len());
            for &t in &times {
                let (a, _) = cd_rwa(t, &p)?;
                re.push(a.re);
                im.push(a.im);
            }
            output::write(
                &out_dir.join("fig1_omega_a.csv"),
                &output::columns_csv(&["t", "reOmegaA", "imOmegaA"], &[times, re, im])?,
            )?;

            let gap = full
                .summary
                .final_populations
                .iter()
                .zip(&imag.summary.final_populations)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            let mut s = full.summary.clone();
            s.extra.insert("imagOnlyFidelity".into(), json!(imag.summary.fidelity));
            s.extra
                .insert("imagOnlyFinalPopulations".into(), json!(imag.summary.final_populations));
            s.extra.insert("finalPopulationGap".into(), json!(gap));
            serde_json::to_value(&s).expect("summary serializes")
        }
        PresetSpec::Scan(mut spec) => {
            opts.apply(&mut spec.base);
            if opts.threads.is_some() {
                spec.threads = opts.threads;
            }
            let r = run_scan(&spec)?;
            write_scan(&r, &csv_path)?;
            r.summary_json()
        }
        PresetSpec::Elimination {
            mut effective,
            mut three_level,
            show_effective,
        } => {
            opts.apply(&mut effective);
            opts.apply(&mut three_level);
            let selected = variant_name(&effective);
            let report = compare_elimination(&effective, &three_level)?;
            let shown = if show_effective {
                &report.effective[selected].0
            } else {
                &report.three_level
            };
            output::write(&csv_path, &shown.trajectory.to_csv()?)?;
            let mut s = shown.summary.clone();
            let deviations: BTreeMap<&str, Value> = report
                .effective
                .iter()
                .map(|(k, (_, (d1, d3)))| (*k, json!({"maxDeviationP1": d1, "maxDeviationP3": d3})))
                .collect();
            s.extra.insert("eliminationVariant".into(), json!(selected));
            s.extra.insert("eliminationDeviations".into(), json!(deviations));
            serde_json::to_value(&s).expect("summary serializes")
        }
    };
    summary["preset"] = json!(preset.id);
    output::write(
        &out_dir.join(format!("{}.summary.json", preset.id)),
        &serde_json::to_string_pretty(&summary).expect("summary serializes"),
    )?;
    Ok(summary)
}
