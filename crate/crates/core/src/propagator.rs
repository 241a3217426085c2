//! Fixed- and adaptive-step RK4 for `iψ̇ = H(t)ψ` with non-Hermitian `H`.
//!
//! The norm is never renormalized: loss through the imaginary part of the
//! Hamiltonian is part of the physics.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{require, NumResult, NumericError, ParamError};
use crate::linalg::{axpy, inner, norm_sqr, Matrix, Vector, C64, I};
use crate::three_level::{dark_state, ThreeLevelParams};

/// A time-dependent Hamiltonian (ħ = 1, rad/s).
pub trait Hamiltonian<const N: usize>: Sync {
    fn at(&self, t: f64) -> NumResult<Matrix<N>>;

    /// Fastest intrinsic frequency of the reference problem (carrier
    /// harmonics, detunings, Rabi amplitudes, decay) used for the step bound.
    fn fastest_frequency(&self) -> f64;
}

/// Adapter turning a closure into a [`Hamiltonian`].
pub struct FnHamiltonian<F> {
    f: F,
    fastest: f64,
}

impl<F> FnHamiltonian<F> {
    pub fn new(fastest: f64, f: F) -> Self {
        FnHamiltonian { f, fastest }
    }
}

impl<const N: usize, F> Hamiltonian<N> for FnHamiltonian<F>
where
    F: Fn(f64) -> Matrix<N> + Sync,
{
    fn at(&self, t: f64) -> NumResult<Matrix<N>> {
        Ok((self.f)(t))
    }

    fn fastest_frequency(&self) -> f64 {
        self.fastest
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    #[serde(alias = "rk4Fixed", alias = "RK4Fixed")]
    Rk4Fixed,
    /// Step doubling with local error control.
    #[serde(alias = "rk4Adaptive", alias = "RK4Adaptive")]
    Rk4Adaptive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct IntegratorSpec {
    pub method: Method,
    /// Explicit step [s]. When absent the step is derived from the carrier
    /// bound and `min_steps`.
    pub dt: Option<f64>,
    /// Local error tolerance of the adaptive method.
    pub tolerance: f64,
    /// Minimum number of steps per period of the fastest frequency.
    pub carrier_resolution: f64,
    /// Lower bound on the number of fixed steps over `[0, t_f]`.
    pub min_steps: usize,
    /// Approximate number of stored rows; propagation itself runs at full
    /// resolution.
    pub max_rows: usize,
}

impl Default for IntegratorSpec {
    fn default() -> Self {
        IntegratorSpec {
            method: Method::Rk4Fixed,
            dt: None,
            tolerance: 1e-10,
            carrier_resolution: 20.0,
            min_steps: 20_000,
            max_rows: 1000,
        }
    }
}

impl IntegratorSpec {
    pub fn validate(&self) -> Result<(), ParamError> {
        if let Some(dt) = self.dt {
            require(dt > 0.0 && dt.is_finite(), "dt", "must be > 0")?;
        }
        require(self.carrier_resolution >= 20.0, "carrierResolution", "must be >= 20")?;
        require(self.tolerance > 0.0, "tolerance", "must be > 0")?;
        require(self.min_steps >= 1, "minSteps", "must be >= 1")?;
        require(self.max_rows >= 2, "maxRows", "must be >= 2")
    }

    /// Largest admissible step, `2π/(resolution·ω_max)`.
    pub fn max_dt(&self, fastest: f64) -> f64 {
        if fastest > 0.0 {
            TAU / (self.carrier_resolution * fastest)
        } else {
            f64::INFINITY
        }
    }
}

/// Stored samples of one propagation.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<const N: usize> {
    pub times: Vec<f64>,
    pub states: Vec<Vector<N>>,
    /// Number of integration steps actually taken.
    pub steps: usize,
    /// Smallest ‖ψ‖ seen at any step, stored or not.
    pub min_norm: f64,
}

impl<const N: usize> Trajectory<N> {
    pub fn final_state(&self) -> &Vector<N> {
        self.states.last().expect("trajectory is never empty")
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// One-based level label, `|1⟩ … |N⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Level(pub usize);

impl Level {
    pub fn index<const N: usize>(self) -> Option<usize> {
        (1..=N).contains(&self.0).then(|| self.0 - 1)
    }

    pub fn basis<const N: usize>(self) -> Option<Vector<N>> {
        let i = self.index::<N>()?;
        let mut v = [C64::new(0.0, 0.0); N];
        v[i] = C64::new(1.0, 0.0);
        Some(v)
    }
}

fn rhs<const N: usize, H: Hamiltonian<N>>(h: &H, t: f64, psi: &Vector<N>) -> NumResult<Vector<N>> {
    let mut d = h.at(t)?.mul_vec(psi);
    for x in d.iter_mut() {
        *x *= -I;
    }
    Ok(d)
}

fn rk4_step<const N: usize, H: Hamiltonian<N>>(h: &H, t: f64, dt: f64, psi: &Vector<N>) -> NumResult<Vector<N>> {
    let half = C64::new(dt / 2.0, 0.0);
    let full = C64::new(dt, 0.0);
    let k1 = rhs(h, t, psi)?;
    let k2 = rhs(h, t + dt / 2.0, &axpy(psi, half, &k1))?;
    let k3 = rhs(h, t + dt / 2.0, &axpy(psi, half, &k2))?;
    let k4 = rhs(h, t + dt, &axpy(psi, full, &k3))?;
    let mut out = *psi;
    let w = dt / 6.0;
    for i in 0..N {
        out[i] += w * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    Ok(out)
}

fn check_finite<const N: usize>(psi: &Vector<N>, t: f64) -> NumResult<()> {
    if psi.iter().all(|z| z.is_finite()) {
        Ok(())
    } else {
        Err(NumericError::NonFinite { t })
    }
}

/// Integrate `iψ̇ = H(t)ψ` from `ψ(0) = psi0` to `t_f`.
pub fn evolve<const N: usize, H: Hamiltonian<N>>(
    h: &H,
    psi0: Vector<N>,
    tf: f64,
    spec: &IntegratorSpec,
) -> NumResult<Trajectory<N>> {
    let norm0 = norm_sqr(&psi0).sqrt();
    if (norm0 - 1.0).abs() > 1e-12 {
        return Err(NumericError::NotNormalized { norm: norm0 });
    }
    let max_dt = spec.max_dt(h.fastest_frequency());
    if let Some(dt) = spec.dt {
        if dt > max_dt {
            return Err(NumericError::StepTooCoarse { dt, max_dt });
        }
    }
    match spec.method {
        Method::Rk4Fixed => evolve_fixed(h, psi0, tf, spec, max_dt),
        Method::Rk4Adaptive => evolve_adaptive(h, psi0, tf, spec, max_dt),
    }
}

fn evolve_fixed<const N: usize, H: Hamiltonian<N>>(
    h: &H,
    psi0: Vector<N>,
    tf: f64,
    spec: &IntegratorSpec,
    max_dt: f64,
) -> NumResult<Trajectory<N>> {
    let steps = match spec.dt {
        Some(dt) => (tf / dt).ceil().max(1.0) as usize,
        None => ((tf / max_dt).ceil() as usize).max(spec.min_steps),
    };
    let dt = tf / steps as f64;
    let stride = (steps / spec.max_rows).max(1);

    let mut times = vec![0.0];
    let mut states = vec![psi0];
    let mut psi = psi0;
    let mut min_norm = 1.0f64;
    for k in 0..steps {
        let t = k as f64 * dt;
        psi = rk4_step(h, t, dt, &psi)?;
        let t_next = (k + 1) as f64 * dt;
        check_finite(&psi, t_next)?;
        min_norm = min_norm.min(norm_sqr(&psi).sqrt());
        if (k + 1) % stride == 0 || k + 1 == steps {
            times.push(t_next);
            states.push(psi);
        }
    }
    Ok(Trajectory {
        times,
        states,
        steps,
        min_norm,
    })
}

fn evolve_adaptive<const N: usize, H: Hamiltonian<N>>(
    h: &H,
    psi0: Vector<N>,
    tf: f64,
    spec: &IntegratorSpec,
    max_dt: f64,
) -> NumResult<Trajectory<N>> {
    let cap = max_dt.min(tf);
    let mut dt = spec.dt.unwrap_or(cap).min(cap);
    let mut t = 0.0;
    let mut psi = psi0;
    let mut times = vec![0.0];
    let mut states = vec![psi0];
    let mut min_norm = 1.0f64;
    let mut steps = 0usize;
    while t < tf {
        let last = t + dt >= tf;
        let step = if last { tf - t } else { dt };
        let full = rk4_step(h, t, step, &psi)?;
        let mid = rk4_step(h, t, step / 2.0, &psi)?;
        let fine = rk4_step(h, t + step / 2.0, step / 2.0, &mid)?;
        let err = full
            .iter()
            .zip(fine.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
            / 15.0;
        let scale = norm_sqr(&psi).sqrt().max(1e-300);
        let tol = spec.tolerance * scale.max(1.0);
        if err <= tol || step <= tf * 1e-14 {
            // Richardson-corrected solution
            let mut next = fine;
            for i in 0..N {
                next[i] += (fine[i] - full[i]) / 15.0;
            }
            t = if last { tf } else { t + step };
            check_finite(&next, t)?;
            psi = next;
            steps += 1;
            min_norm = min_norm.min(norm_sqr(&psi).sqrt());
            times.push(t);
            states.push(psi);
        }
        let factor = if err > 0.0 {
            (0.9 * (tol / err).powf(0.2)).clamp(0.1, 4.0)
        } else {
            4.0
        };
        dt = (step * factor).min(cap);
    }
    let (times, states) = thin(times, states, spec.max_rows);
    Ok(Trajectory {
        times,
        states,
        steps,
        min_norm,
    })
}

fn thin<const N: usize>(times: Vec<f64>, states: Vec<Vector<N>>, max_rows: usize) -> (Vec<f64>, Vec<Vector<N>>) {
    let n = times.len();
    let stride = ((n - 1) / max_rows).max(1);
    let keep = |i: usize| i % stride == 0 || i == n - 1;
    let t = times
        .iter()
        .enumerate()
        .filter(|(i, _)| keep(*i))
        .map(|(_, v)| *v)
        .collect();
    let s = states
        .iter()
        .enumerate()
        .filter(|(i, _)| keep(*i))
        .map(|(_, v)| *v)
        .collect();
    (t, s)
}

/// `P_i(t) = |c_i(t)|²`, not normalized by ‖ψ‖².
pub fn populations<const N: usize>(tr: &Trajectory<N>) -> Vec<[f64; N]> {
    tr.states
        .iter()
        .map(|psi| {
            let mut p = [0.0; N];
            for (pi, c) in p.iter_mut().zip(psi.iter()) {
                *pi = c.norm_sqr();
            }
            p
        })
        .collect()
}

/// `F = |⟨target|Ψ(t_f)⟩|²` on the raw final state. `None` for an invalid level.
pub fn fidelity<const N: usize>(tr: &Trajectory<N>, target: Level) -> Option<f64> {
    let i = target.index::<N>()?;
    Some(tr.final_state()[i].norm_sqr())
}

/// Same as [`fidelity`] but with the final state normalized first.
pub fn normalized_fidelity<const N: usize>(tr: &Trajectory<N>, target: Level) -> Option<f64> {
    let psi = tr.final_state();
    let i = target.index::<N>()?;
    Some(psi[i].norm_sqr() / norm_sqr(psi))
}

/// `|⟨Ê₀(t)|ψ(t)⟩|² / ‖ψ(t)‖²` at each stored time.
pub fn dark_state_overlap(tr: &Trajectory<3>, p: &ThreeLevelParams) -> NumResult<Vec<f64>> {
    tr.times
        .iter()
        .zip(tr.states.iter())
        .map(|(&t, psi)| {
            let dark = dark_state(t, p)?;
            Ok(inner(&dark, psi).norm_sqr() / norm_sqr(psi))
        })
        .collect()
}
