//! Closed-form drive envelopes and their analytic time derivatives.
//!
//! Two families are provided: the Allen-Eberly pair (sech amplitude, tanh
//! chirp) driving the two-level system, and a pair of equal Gaussians
//! (pump and Stokes) driving the Λ system. [`dress_counter_rotating`] turns
//! a rotating-wave envelope `Ω(t)` into `Ω(t)(1 + e^{-2iωt})`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{require, ParamError};
use crate::linalg::{C64, I};
use crate::units;

/// Instantaneous value of a drive envelope together with its time derivative.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PulseSample {
    /// rad/s
    pub value: C64,
    /// rad/s²
    pub derivative: C64,
}

impl PulseSample {
    pub fn real(value: f64, derivative: f64) -> Self {
        PulseSample {
            value: C64::new(value, 0.0),
            derivative: C64::new(derivative, 0.0),
        }
    }

    pub fn conj(&self) -> Self {
        PulseSample {
            value: self.value.conj(),
            derivative: self.derivative.conj(),
        }
    }
}

/// Allen-Eberly drive: `Ω_R = Ω₀ sech x`, `Δ = (2δ²t₀/π) tanh x` with
/// `x = π(t − t_f/2)/(2t₀)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AeParams {
    #[serde(deserialize_with = "units::frequency")]
    pub omega0: f64,
    #[serde(deserialize_with = "units::frequency")]
    pub delta: f64,
    #[serde(deserialize_with = "units::time")]
    pub t0: f64,
    #[serde(deserialize_with = "units::time")]
    pub tf: f64,
}

impl AeParams {
    pub fn validate(&self) -> Result<(), ParamError> {
        require(self.omega0 > 0.0, "omega0", "must be > 0")?;
        require(self.delta.is_finite(), "delta", "must be finite")?;
        require(self.t0 > 0.0, "t0", "must be > 0")?;
        require(self.tf > 0.0, "tf", "must be > 0")
    }

    /// Amplitude of the tanh chirp, `2δ²t₀/π`.
    pub fn chirp_amplitude(&self) -> f64 {
        2.0 * self.delta * self.delta * self.t0 / PI
    }
}

/// Allen-Eberly Rabi envelope and detuning at time `t`.
pub fn ae_drive(t: f64, p: &AeParams) -> (PulseSample, PulseSample) {
    let rate = PI / (2.0 * p.t0);
    let x = rate * (t - p.tf / 2.0);
    let sech = 1.0 / x.cosh();
    let tanh = x.tanh();
    let rabi = PulseSample::real(p.omega0 * sech, -p.omega0 * sech * tanh * rate);
    let amp = p.chirp_amplitude();
    let detuning = PulseSample::real(amp * tanh, amp * rate * sech * sech);
    (rabi, detuning)
}

/// Pump and Stokes Gaussians of equal peak `omega0` and width `width`, the
/// pump centred at `t_f/2 + τ` and the Stokes pulse at `t_f/2 − τ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianPairParams {
    #[serde(deserialize_with = "units::frequency")]
    pub omega0: f64,
    #[serde(deserialize_with = "units::time")]
    pub tau: f64,
    #[serde(deserialize_with = "units::time")]
    pub width: f64,
    #[serde(deserialize_with = "units::time")]
    pub tf: f64,
}

impl GaussianPairParams {
    /// `T = t_f/6`, `τ = t_f/10`, the proportions used for every Λ-system run.
    pub fn standard(omega0: f64, tf: f64) -> Self {
        GaussianPairParams {
            omega0,
            tau: tf / 10.0,
            width: tf / 6.0,
            tf,
        }
    }

    pub fn validate(&self) -> Result<(), ParamError> {
        require(self.omega0 > 0.0, "omega0", "must be > 0")?;
        require(self.width > 0.0, "width", "must be > 0")?;
        require(self.tf > 0.0, "tf", "must be > 0")?;
        require(self.tau >= 0.0, "tau", "must be >= 0")
    }

    fn gaussian(&self, t: f64, centre: f64) -> PulseSample {
        let x = (t - centre) / self.width;
        let v = self.omega0 * (-x * x).exp();
        PulseSample::real(v, -2.0 * x / self.width * v)
    }
}

/// `(pump, stokes)` at time `t`. The Stokes pulse comes first.
pub fn gaussian_pair(t: f64, p: &GaussianPairParams) -> (PulseSample, PulseSample) {
    let mid = p.tf / 2.0;
    (p.gaussian(t, mid + p.tau), p.gaussian(t, mid - p.tau))
}

/// Multiply an envelope by `1 + e^{-2iωt}` (product rule for the derivative).
pub fn dress_counter_rotating(s: PulseSample, omega: f64, t: f64) -> PulseSample {
    let phase = (-2.0 * I * omega * t).exp();
    let factor = 1.0 + phase;
    PulseSample {
        value: s.value * factor,
        derivative: s.derivative * factor + s.value * (-2.0 * I * omega) * phase,
    }
}
