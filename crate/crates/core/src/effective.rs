//! Effective two-level model of the Λ system at large single-photon
//! detuning, obtained by adiabatically eliminating the excited state.
//!
//! The effective basis is `(|1⟩, |3⟩)`, so the transfer target is level 2 of
//! the effective model.
//!
//! Setting `ċ₂ = 0` gives `c₂ = −(Ω̄_p* c₁ + Ω̄_s c₃)/(2Δ − iΓ)` and
//!
//! ```text
//! i d/dt (c₁, c₃) = −1/(2(2Δ − iΓ)) [[|Ω̄_p|², Ω̄_pΩ̄_s], [Ω̄_p*Ω̄_s*, |Ω̄_s|²]] (c₁, c₃)
//! ```
//!
//! which, after removing the common shift `−(|Ω̄_p|² + |Ω̄_s|²)/(4(2Δ − iΓ))`,
//! reads `½[[−Δ_eff, Ω_eff], [·, Δ_eff]]` with
//! `Ω_eff = −Ω̄_pΩ̄_s/(2Δ − iΓ)` and `Δ_eff = (|Ω̄_p|² − |Ω̄_s|²)/(2(2Δ − iΓ))`.
//! This is [`EliminationVariant::StandardElimination`]. The lower-left entry
//! is taken as `Ω_eff*`, as in the counterdiabatic construction.
//!
//! [`EliminationVariant::AsPrinted`] swaps the roles:
//! `Δ_eff = −Ω̄_p²/(2Δ − iΓ)`, `Ω_eff = (|Ω̄_p|² − |Ω̄_s|²)/(4Δ − 2iΓ)`.
//! Only the standard form tracks the full three-level dynamics, so it is the
//! default.

use serde::{Deserialize, Serialize};

use crate::error::{NumResult, NumericError, ParamError};
use crate::linalg::{ComplexMatrix2, Matrix, C64, I};
use crate::propagator::Hamiltonian;
use crate::three_level::{xi0, ThreeLevelParams, XI0_CUTOFF};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum EliminationVariant {
    AsPrinted,
    #[default]
    StandardElimination,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct EffectiveParams {
    pub base: ThreeLevelParams,
    #[serde(default)]
    pub variant: EliminationVariant,
}

impl EffectiveParams {
    pub fn validate(&self) -> Result<(), ParamError> {
        self.base.validate().map_err(|e| e.within("base"))?;
        self.far_detuned();
        Ok(())
    }

    /// `|Δ| ≥ 5Ω₀`; logs a warning otherwise.
    pub fn far_detuned(&self) -> bool {
        let ok = self.base.delta_p.abs() >= 5.0 * self.base.pulses.omega0;
        if !ok {
            log::warn!(
                "detuning {:e} rad/s is below 5×Ω₀ = {:e} rad/s; adiabatic elimination is questionable",
                self.base.delta_p,
                5.0 * self.base.pulses.omega0
            );
        }
        ok
    }

    pub fn fastest_frequency(&self) -> f64 {
        let b = &self.base;
        let (carrier, rabi) = if b.counter_rotating {
            (2.0 * b.omega_p.max(b.omega_s), 2.0 * b.pulses.omega0)
        } else {
            (0.0, b.pulses.omega0)
        };
        let d = C64::new(2.0 * b.delta_p, -b.gamma).norm().max(f64::MIN_POSITIVE);
        carrier.max(rabi * rabi / d)
    }
}

/// `Δ_eff, Ω_eff` and their time derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveCouplings {
    pub delta: C64,
    pub delta_dot: C64,
    pub omega: C64,
    pub omega_dot: C64,
}

pub fn couplings(t: f64, p: &EffectiveParams) -> NumResult<EffectiveCouplings> {
    let b = &p.base;
    let d = C64::new(2.0 * b.delta_p, -b.gamma);
    if d.norm() <= 1e-12 * b.pulses.omega0 {
        return Err(NumericError::Singular { what: "2Δ − iΓ", t });
    }
    let (pump, stokes) = b.dressed(t);
    let (op, dp, os, ds) = (pump.value, pump.derivative, stokes.value, stokes.derivative);
    let contrast = op.norm_sqr() - os.norm_sqr();
    let contrast_dot = 2.0 * ((op.conj() * dp).re - (os.conj() * ds).re);

    Ok(match p.variant {
        EliminationVariant::AsPrinted => EffectiveCouplings {
            delta: -op * op / d,
            delta_dot: -2.0 * op * dp / d,
            omega: contrast / (2.0 * d),
            omega_dot: contrast_dot / (2.0 * d),
        },
        EliminationVariant::StandardElimination => EffectiveCouplings {
            delta: contrast / (2.0 * d),
            delta_dot: contrast_dot / (2.0 * d),
            omega: -op * os / d,
            omega_dot: -(dp * os + op * ds) / d,
        },
    })
}

/// `½[[−Δ_eff, Ω_eff], [Ω_eff*, Δ_eff]]`.
pub fn effective_hamiltonian(t: f64, p: &EffectiveParams) -> NumResult<ComplexMatrix2> {
    let c = couplings(t, p)?;
    Ok(Matrix::from_rows([[-c.delta, c.omega], [c.omega.conj(), c.delta]]) * 0.5)
}

/// `M = |Ω_eff|² + Δ_eff²`.
pub fn cd_denominator(c: &EffectiveCouplings) -> C64 {
    c.omega.norm_sqr() + c.delta * c.delta
}

/// `(i/2M)[[0, P], [−P*, Q]]` with `P = Ω̇_effΔ_eff − Δ̇_effΩ_eff` and
/// `Q = Ω̇_eff*Ω_eff − Ω̇_effΩ_eff*`. Zero once the pulses are off.
pub fn effective_cd(t: f64, p: &EffectiveParams) -> NumResult<ComplexMatrix2> {
    if xi0(t, &p.base) < XI0_CUTOFF * p.base.pulses.omega0 {
        return Ok(Matrix::zeros());
    }
    let c = couplings(t, p)?;
    let m = cd_denominator(&c);
    let scale = c.omega.norm_sqr() + c.delta.norm_sqr();
    if m.norm() < 1e-10 * scale || m.norm() == 0.0 {
        return Err(NumericError::Singular {
            what: "effective counterdiabatic denominator",
            t,
        });
    }
    let pp = c.omega_dot * c.delta - c.delta_dot * c.omega;
    let q = c.omega_dot.conj() * c.omega - c.omega_dot * c.omega.conj();
    let zero = C64::new(0.0, 0.0);
    Ok(Matrix::from_rows([[zero, pp], [-pp.conj(), q]]) * (I / (2.0 * m)))
}

#[derive(Debug, Clone, Copy)]
pub struct EffectiveSystem {
    pub params: EffectiveParams,
    pub with_cd: bool,
}

impl Hamiltonian<2> for EffectiveSystem {
    fn at(&self, t: f64) -> NumResult<ComplexMatrix2> {
        let h = effective_hamiltonian(t, &self.params)?;
        if self.with_cd {
            Ok(h + effective_cd(t, &self.params)?)
        } else {
            Ok(h)
        }
    }

    fn fastest_frequency(&self) -> f64 {
        self.params.fastest_frequency()
    }
}
