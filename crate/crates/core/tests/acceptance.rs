//! Acceptance criteria. Each test writes one `criterion N: PASS|FAIL` line
//! straight to stderr so the verdicts show up even when output is captured.

use std::io::Write;
use std::path::Path;
use std::time::{Duration, Instant};

use sta_core::harness::presets::{compare_elimination, preset, PresetSpec};
use sta_core::harness::{
    run_config, run_preset, run_scan, CdKind, PresetOptions, ScanResult, SystemConfig, PRESET_IDS,
};
use sta_core::linalg::{norm_sqr, Matrix};
use sta_core::propagator::FnHamiltonian;
use sta_core::pulses::{ae_drive, gaussian_pair};
use sta_core::three_level::{self, ThreeLevelParams, XI0_CUTOFF};
use sta_core::two_level::{self, TwoLevelCd, TwoLevelParams, TwoLevelSystem};
use sta_core::units::two_pi_mhz;
use sta_core::{effective, evolve, IntegratorSpec, Level, C64};

fn report(n: u32, pass: bool, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    let line = format!("criterion {n}: {verdict} {detail}\n");
    std::io::stderr().write_all(line.as_bytes()).unwrap();
    assert!(pass, "criterion {n} failed: {detail}");
}

fn run_cfg(id: &str) -> SystemConfig {
    match preset(id).unwrap().spec {
        PresetSpec::Run(cfg) | PresetSpec::AuxiliaryField(cfg) => cfg,
        _ => panic!("{id} is not a single run"),
    }
}

fn secs(d: Duration) -> f64 {
    d.as_secs_f64()
}

#[test]
fn criterion_1_rwa_transfer() {
    let start = Instant::now();
    let r = run_config(&run_cfg("fig2a")).unwrap();
    let took = secs(start.elapsed());
    let p2 = r.summary.fidelity;
    report(
        1,
        p2 >= 0.95 && took < 1.0,
        &format!("P2(tf) = {p2:.6} (>= 0.95), {took:.2} s (< 1 s)"),
    );
}

#[test]
fn criterion_2_beyond_rwa_beats_mismatched_rwa() {
    let start = Instant::now();
    let rwa = run_config(&run_cfg("fig2b")).unwrap().summary.fidelity;
    let beyond = run_config(&run_cfg("fig2c")).unwrap().summary.fidelity;
    let took = secs(start.elapsed());
    let margin = beyond - rwa;
    report(
        2,
        margin >= 0.05 && took < 5.0,
        &format!("P2 beyond-RWA = {beyond:.6}, P2 RWA = {rwa:.6}, margin {margin:.6} (>= 0.05), {took:.2} s (< 5 s)"),
    );
}

#[test]
fn criterion_3_dark_state_transport() {
    let start = Instant::now();
    let r = run_config(&run_cfg("fig3b")).unwrap();
    let took = secs(start.elapsed());
    let p3 = r.summary.fidelity;
    let p2_max = r.trajectory.populations().iter().map(|p| p[1]).fold(0.0, f64::max);
    report(
        3,
        p3 >= 0.95 && p2_max <= 0.05 && took < 10.0,
        &format!("P3(tf) = {p3:.6} (>= 0.95), max P2 = {p2_max:.3e} (<= 0.05), {took:.2} s (< 10 s)"),
    );
}

fn small_scan(id: &str) -> ScanResult {
    let PresetSpec::Scan(mut spec) = preset(id).unwrap().spec else {
        panic!("{id} is a scan")
    };
    spec.axis1.count = 5;
    spec.axis2.count = 5;
    let r = run_scan(&spec).unwrap();
    assert!(r.failures.is_empty(), "{id}: {:?}", r.failures);
    r
}

#[test]
fn criterion_4_robustness_grids() {
    let start = Instant::now();
    let [a, b, c, d] = ["fig4a", "fig4b", "fig4c", "fig4d"].map(small_scan);
    let took = secs(start.elapsed());
    let matched = b.min() >= 0.95 && d.min() >= 0.95;
    let gap = a.min() <= b.min() - 0.2 && c.min() <= d.min() - 0.2;
    report(
        4,
        matched && gap && took < 120.0,
        &format!(
            "matched min (Ω0,Γ) = {:.6}, (Δ,Γ) = {:.6} (>= 0.95); RWA min {:.6}, {:.6} (>= 0.2 below); {took:.1} s (< 120 s)",
            b.min(),
            d.min(),
            a.min(),
            c.min()
        ),
    );
}

#[test]
fn criterion_5_effective_model_agreement() {
    let PresetSpec::Elimination {
        effective, three_level, ..
    } = preset("fig5a").unwrap().spec
    else {
        panic!("fig5a compares two models")
    };
    let report5 = compare_elimination(&effective, &three_level).unwrap();
    let (_, (d1, d3)) = &report5.effective["standardElimination"];
    let (_, (p1, p3)) = &report5.effective["asPrinted"];
    let best = d1.max(*d3).min(p1.max(*p3));
    let either = d1.max(*d3) < 0.05 || p1.max(*p3) < 0.05;

    // both deviations must be recorded in the written summary
    let dir = tempfile::tempdir().unwrap();
    let summary = run_preset("fig5a", dir.path(), &PresetOptions::default()).unwrap();
    let recorded = ["asPrinted", "standardElimination"].iter().all(|v| {
        let e = &summary["eliminationDeviations"][v];
        e["maxDeviationP1"].is_number() && e["maxDeviationP3"].is_number()
    });
    let pass = recorded && (either || best < 0.15);
    report(
        5,
        pass,
        &format!(
            "standard elimination max|ΔP1| = {d1:.4}, max|ΔP3| = {d3:.4}; AsPrinted variant {p1:.4}, {p3:.4} (< 0.05, fallback < 0.15)"
        ),
    );
}

fn fig2c_params() -> TwoLevelParams {
    match run_cfg("fig2c").system {
        sta_core::harness::SystemParams::TwoLevel(p) => p,
        _ => unreachable!(),
    }
}

fn fig3_params() -> ThreeLevelParams {
    match run_cfg("fig3b").system {
        sta_core::harness::SystemParams::ThreeLevel(p) => p,
        _ => unreachable!(),
    }
}

fn interior(tf: f64, n: usize) -> Vec<f64> {
    (1..n).map(|i| tf * i as f64 / n as f64).collect()
}

fn identity_error<const N: usize>(m: &Matrix<N>) -> f64 {
    (*m - Matrix::identity()).max_abs()
}

/// Worst relative error of analytic derivatives against central differences.
struct DerivativeCheck {
    worst: f64,
}

impl DerivativeCheck {
    fn compare(&mut self, analytic: &[C64], numeric: &[C64]) {
        let scale = analytic.iter().map(|a| a.norm()).fold(0.0, f64::max);
        for (a, n) in analytic.iter().zip(numeric) {
            self.worst = self.worst.max((a - n).norm() / scale);
        }
    }
}

fn central<F: Fn(f64) -> C64>(f: F, t: f64, h: f64) -> C64 {
    (f(t + h) - f(t - h)) / (2.0 * h)
}

fn derivative_errors(p2: &TwoLevelParams, p3: &ThreeLevelParams) -> f64 {
    let mut check = DerivativeCheck { worst: 0.0 };
    let re = |x: f64| C64::new(x, 0.0);

    let tf = p2.pulse.tf;
    let ts = interior(tf, 97);
    let h = 1e-4 / p2.fastest_frequency();
    let ae = |t: f64| ae_drive(t, &p2.pulse);
    check.compare(
        &ts.iter().map(|&t| ae(t).0.derivative).collect::<Vec<_>>(),
        &ts.iter().map(|&t| central(|s| ae(s).0.value, t, h)).collect::<Vec<_>>(),
    );
    check.compare(
        &ts.iter().map(|&t| ae(t).1.derivative).collect::<Vec<_>>(),
        &ts.iter().map(|&t| central(|s| ae(s).1.value, t, h)).collect::<Vec<_>>(),
    );
    check.compare(
        &ts.iter().map(|&t| re(p2.coupling(t).1)).collect::<Vec<_>>(),
        &ts.iter()
            .map(|&t| central(|s| re(p2.coupling(s).0), t, h))
            .collect::<Vec<_>>(),
    );
    let mut beta_a = Vec::new();
    let mut beta_n = Vec::new();
    for &t in &ts {
        let b = two_level::mixing_angle(t, p2, None).unwrap();
        let at = |s: f64| two_level::mixing_angle(s, p2, Some(&b)).unwrap().beta;
        beta_a.push(b.beta_dot);
        beta_n.push(central(at, t, h));
    }
    check.compare(&beta_a, &beta_n);

    let tf = p3.pulses.tf;
    let ts = interior(tf, 97);
    let h = 1e-4 / p3.fastest_frequency();
    let g = |t: f64| gaussian_pair(t, &p3.pulses);
    for k in 0..2 {
        let pick = |t: f64| if k == 0 { g(t).0 } else { g(t).1 };
        check.compare(
            &ts.iter().map(|&t| pick(t).derivative).collect::<Vec<_>>(),
            &ts.iter().map(|&t| central(|s| pick(s).value, t, h)).collect::<Vec<_>>(),
        );
        let dressed = |t: f64| if k == 0 { p3.dressed(t).0 } else { p3.dressed(t).1 };
        check.compare(
            &ts.iter().map(|&t| dressed(t).derivative).collect::<Vec<_>>(),
            &ts.iter()
                .map(|&t| central(|s| dressed(s).value, t, h))
                .collect::<Vec<_>>(),
        );
    }
    let mut hd_a = Vec::new();
    let mut hd_n = Vec::new();
    for &t in &ts {
        let fd = (three_level::hamiltonian(t + h, p3) - three_level::hamiltonian(t - h, p3)) * (0.5 / h);
        let an = three_level::h0dot(t, p3);
        for i in 0..3 {
            for j in 0..3 {
                hd_a.push(an[(i, j)]);
                hd_n.push(fd[(i, j)]);
            }
        }
    }
    check.compare(&hd_a, &hd_n);

    for variant in [
        effective::EliminationVariant::StandardElimination,
        effective::EliminationVariant::AsPrinted,
    ] {
        let ep = effective::EffectiveParams { base: *p3, variant };
        let c = |t: f64| effective::couplings(t, &ep).unwrap();
        check.compare(
            &ts.iter().map(|&t| c(t).delta_dot).collect::<Vec<_>>(),
            &ts.iter().map(|&t| central(|s| c(s).delta, t, h)).collect::<Vec<_>>(),
        );
        check.compare(
            &ts.iter().map(|&t| c(t).omega_dot).collect::<Vec<_>>(),
            &ts.iter().map(|&t| central(|s| c(s).omega, t, h)).collect::<Vec<_>>(),
        );
    }
    check.worst
}

/// Observed order of the fixed-step integrator on the bare Λ system.
fn rk4_order(p: &ThreeLevelParams) -> f64 {
    let h = FnHamiltonian::new(1.0, |t| three_level::hamiltonian(t, p));
    let tf = p.pulses.tf;
    let psi0 = Level(1).basis::<3>().unwrap();
    let solve = |n: usize| {
        let spec = IntegratorSpec {
            dt: Some(tf / n as f64),
            max_rows: 2,
            ..Default::default()
        };
        *evolve(&h, psi0, tf, &spec).unwrap().final_state()
    };
    let reference = solve(25_600);
    let err = |n: usize| {
        let psi = solve(n);
        psi.iter()
            .zip(&reference)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    };
    (err(800) / err(1600)).log2()
}

/// Worst relative mismatch of `d‖ψ‖²/dt` against `−Γ|C₂|²`.
fn norm_decay_error(cd: TwoLevelCd, start: Level) -> f64 {
    let mut params = run_cfg("fig2a").system;
    let sta_core::harness::SystemParams::TwoLevel(p) = &mut params else {
        unreachable!()
    };
    p.gamma = two_pi_mhz(50.0);
    let sys = TwoLevelSystem { params: *p, cd };
    let spec = IntegratorSpec {
        max_rows: 1_000_000,
        ..Default::default()
    };
    let tr = evolve(&sys, start.basis::<2>().unwrap(), p.pulse.tf, &spec).unwrap();
    let norms: Vec<f64> = tr.states.iter().map(norm_sqr).collect();
    let k = 1;
    let mut worst = 0.0f64;
    let mut checked = 0;
    for i in k..tr.times.len() - k {
        let c2 = tr.states[i][1].norm_sqr();
        if c2 < 1e-3 {
            continue;
        }
        let lhs = (norms[i + k] - norms[i - k]) / (tr.times[i + k] - tr.times[i - k]);
        let rhs = -p.gamma * c2;
        worst = worst.max(((lhs - rhs) / rhs).abs());
        checked += 1;
    }
    assert!(checked > 100, "only {checked} samples with a populated upper level");
    worst
}

#[test]
fn criterion_6_property_suites() {
    let start = Instant::now();
    let p2 = fig2c_params();
    let p3 = fig3_params();
    let mut lines = Vec::new();
    let mut pass = true;
    let mut record = |ok: bool, text: String| {
        pass &= ok;
        lines.push(format!("{} {text}", if ok { "ok" } else { "FAILED" }));
    };

    let mut gram2 = 0.0f64;
    let w = p2.phase_frequency();
    let ts2 = interior(p2.pulse.tf, 400);
    for (beta, &t) in two_level::mixing_angle_series(&ts2, &p2).unwrap().iter().zip(&ts2) {
        gram2 = gram2.max(identity_error(&two_level::eigenstates(beta, w, t).gram()));
    }
    record(gram2 <= 1e-12, format!("two-level Gram = I: {gram2:.2e} (1e-12)"));

    let ts3: Vec<f64> = interior(p3.pulses.tf, 400)
        .into_iter()
        .filter(|&t| three_level::xi0(t, &p3) >= XI0_CUTOFF * p3.pulses.omega0)
        .collect();
    let systems = three_level::eigensystem_series(&ts3, &p3).unwrap();
    let (mut gram3, mut proj, mut quad) = (0.0f64, 0.0f64, 0.0f64);
    for (es, &t) in systems.iter().zip(&ts3) {
        gram3 = gram3.max(identity_error(&es.gram()));
        let ps = three_level::projectors(es);
        let sum = ps.pi[0] + ps.pi[1] + ps.pi[2];
        proj = proj.max(identity_error(&sum));
        for j in 0..3 {
            for k in 0..3 {
                let target = if j == k { ps.pi[j] } else { Matrix::zeros() };
                let scale = ps.pi[j].max_abs().max(ps.pi[k].max_abs()).max(1.0);
                proj = proj.max((ps.pi[j] * ps.pi[k] - target).max_abs() / scale);
            }
        }
        let z = C64::new(p3.delta_p, -p3.gamma / 2.0);
        let x0 = three_level::xi0(t, &p3);
        for e in es.eps {
            let scale = z.norm_sqr().max(x0 * x0);
            quad = quad.max((e * e - 2.0 * z * e - x0 * x0).norm() / scale);
        }
    }
    record(gram3 <= 1e-9, format!("three-level Gram = I: {gram3:.2e} (1e-9)"));
    record(
        proj <= 1e-9,
        format!("projector idempotency/completeness: {proj:.2e} (1e-9)"),
    );
    record(quad <= 1e-10, format!("ε± quadratic identity: {quad:.2e} (1e-10)"));

    let d2 = sta_core::harness::run::two_level_cd_discrepancy(&ts2, &p2).unwrap();
    record(
        d2 <= 1e-6,
        format!("two-level closed form vs eigenstate sum: {d2:.2e} (1e-6)"),
    );
    let mut cfg = run_cfg("fig3b");
    cfg.cd = CdKind::ClosedForm;
    cfg.integrator.min_steps = 2000;
    let d3 = run_config(&cfg).unwrap().summary.max_cd_discrepancy;
    let d3_logged = d3.is_some_and(f64::is_finite);
    record(
        d3_logged,
        format!("three-level closed form vs projector sum: {d3:?} (agreement at 1e-6 or logged)"),
    );

    let deriv = derivative_errors(&p2, &p3);
    record(
        deriv <= 1e-6,
        format!("analytic derivatives vs central differences: {deriv:.2e} (1e-6)"),
    );

    let order = rk4_order(&p3);
    record(
        (3.7..=4.3).contains(&order),
        format!("RK4 observed order: {order:.3} ([3.7, 4.3])"),
    );

    let bare = norm_decay_error(TwoLevelCd::None, Level(2));
    let hermitian_cd = norm_decay_error(TwoLevelCd::Rwa { imag_only: true }, Level(1));
    record(
        bare.max(hermitian_cd) <= 1e-6,
        format!("norm-decay law: bare {bare:.2e}, with Hermitian correction {hermitian_cd:.2e} (1e-6)"),
    );

    let took = secs(start.elapsed());
    record(took < 30.0, format!("runtime {took:.1} s (< 30 s)"));
    let mut text = String::new();
    for l in &lines {
        text.push_str("\n    ");
        text.push_str(l);
    }
    report(6, pass, &text);
}

fn dir_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                std::fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

#[test]
fn criterion_7_determinism() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let opts = PresetOptions::default();
    let mut differing = Vec::new();
    for id in PRESET_IDS {
        run_preset(id, a.path(), &opts).unwrap();
        run_preset(id, b.path(), &opts).unwrap();
    }
    let (fa, fb) = (dir_bytes(a.path()), dir_bytes(b.path()));
    assert_eq!(fa.len(), fb.len());
    let csvs = fa.iter().filter(|(n, _)| n.ends_with(".csv")).count();
    for ((na, ba), (nb, bb)) in fa.iter().zip(&fb) {
        if na != nb || ba != bb {
            differing.push(na.clone());
        }
    }
    report(
        7,
        differing.is_empty() && csvs >= PRESET_IDS.len(),
        &format!(
            "{} presets, {csvs} CSVs compared byte for byte, differing: {differing:?}",
            PRESET_IDS.len()
        ),
    );
}
