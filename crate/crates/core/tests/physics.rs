use sta_core::harness::presets::{preset, PresetSpec};
use sta_core::harness::{run_config, SystemConfig, SystemParams};
use sta_core::linalg::norm_sqr;
use sta_core::propagator::FnHamiltonian;
use sta_core::three_level::{ThreeLevelCd, ThreeLevelSystem};
use sta_core::two_level::{self, TwoLevelCd, TwoLevelSystem};
use sta_core::{evolve, Hamiltonian, IntegratorSpec, Level};

fn config(id: &str) -> SystemConfig {
    match preset(id).unwrap().spec {
        PresetSpec::Run(cfg) | PresetSpec::AuxiliaryField(cfg) => cfg,
        _ => panic!("{id} is not a single run"),
    }
}

#[test]
fn projector_correction_keeps_the_lossy_level_empty() {
    let r = run_config(&config("fig3b")).unwrap();
    let pops = r.trajectory.populations();
    let p2_max = pops.iter().map(|p| p[1]).fold(0.0, f64::max);
    assert!(p2_max < 0.05, "{p2_max}");
    assert!(r.summary.fidelity > 0.95);
    assert!(r.summary.extra["minDarkOverlap"].as_f64().unwrap() > 0.99);
}

#[test]
fn imaginary_part_of_the_auxiliary_field_suffices() {
    let mut cfg = config("fig1");
    let full = run_config(&cfg).unwrap().summary.final_populations;
    cfg.imag_only = true;
    let imag = run_config(&cfg).unwrap().summary.final_populations;
    for (a, b) in full.iter().zip(&imag) {
        assert!((a - b).abs() < 0.02, "{full:?} vs {imag:?}");
    }
}

#[test]
fn rwa_correction_fails_once_carriers_matter() {
    let rwa = run_config(&config("fig3a")).unwrap().summary.fidelity;
    let matched = run_config(&config("fig3b")).unwrap().summary.fidelity;
    assert!(matched - rwa > 0.2, "{matched} vs {rwa}");
}

#[test]
fn hermitian_evolution_is_reversible() {
    let mut p = match config("fig2a").system {
        SystemParams::TwoLevel(p) => p,
        _ => unreachable!(),
    };
    p.gamma = 0.0;
    let tf = p.pulse.tf;
    let spec = IntegratorSpec {
        max_rows: 2,
        ..Default::default()
    };
    let forward = TwoLevelSystem {
        params: p,
        cd: TwoLevelCd::Rwa { imag_only: true },
    };
    let psi0 = Level(1).basis::<2>().unwrap();
    let end = *evolve(&forward, psi0, tf, &spec).unwrap().final_state();
    assert!((norm_sqr(&end) - 1.0).abs() < 1e-10);

    let backward = FnHamiltonian::new(forward.fastest_frequency(), |s| -forward.at(tf - s).unwrap());
    let back = *evolve(&backward, end, tf, &spec).unwrap().final_state();
    let err: f64 = back
        .iter()
        .zip(&psi0)
        .map(|(a, b)| (a - b).norm_sqr())
        .sum::<f64>()
        .sqrt();
    assert!(err < 1e-9, "{err}");
}

#[test]
fn dark_state_limit_without_decay_or_correction() {
    // slow STIRAP on resonance: transfer without populating |2⟩ even without a correction
    let mut p = match config("fig3b").system {
        SystemParams::ThreeLevel(p) => p,
        _ => unreachable!(),
    };
    p.counter_rotating = false;
    p.gamma = 0.0;
    p.delta_p = 0.0;
    p.delta_s = 0.0;
    p.pulses.omega0 *= 5.0;
    let sys = ThreeLevelSystem {
        params: p,
        cd: ThreeLevelCd::None,
    };
    let tr = evolve(
        &sys,
        Level(1).basis::<3>().unwrap(),
        p.pulses.tf,
        &IntegratorSpec::default(),
    )
    .unwrap();
    assert!(tr.final_state()[2].norm_sqr() > 0.95);
}

#[test]
fn mixing_angles_are_continuous_along_a_run() {
    let p = match config("fig2c").system {
        SystemParams::TwoLevel(p) => p,
        _ => unreachable!(),
    };
    let n = 4000;
    let times: Vec<f64> = (0..=n).map(|i| p.pulse.tf * i as f64 / n as f64).collect();
    let series = two_level::mixing_angle_series(&times, &p).unwrap();
    for w in series.windows(2) {
        assert!((w[1].beta - w[0].beta).norm() < 0.5);
    }
}

#[test]
#[ignore = "slow: doubles the step count of every single-run preset"]
fn results_do_not_depend_on_the_grid() {
    for id in ["fig1", "fig2a", "fig2b", "fig2c", "fig3a", "fig3b"] {
        let cfg = config(id);
        let base = run_config(&cfg).unwrap().summary.fidelity;
        let mut fine = cfg.clone();
        fine.integrator.min_steps *= 2;
        fine.integrator.carrier_resolution *= 2.0;
        let refined = run_config(&fine).unwrap().summary.fidelity;
        assert!((base - refined).abs() < 1e-6, "{id}: {base} vs {refined}");
    }
}
