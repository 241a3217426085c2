//! Decaying two-level atom driven by an Allen-Eberly pulse, with and without
//! the counter-rotating terms, and its counterdiabatic corrections.
//!
//! Conventions: basis `|1⟩ = (1, 0)`, `|2⟩ = (0, 1)`; ħ = 1. The decay of
//! `|2⟩` enters as `−iΓ/2` on its diagonal.
//!
//! The mixing angle `β` stored in [`MixingAngle`] is the *eigenvector* angle,
//! `β = ½·arctan[X/(Δ − iΓ/2)]` with `X = 2Ω_R cos ω_L t` (or `Ω_R` under
//! the RWA), so that `|φ₊⟩ = (sin β, cos β e^{iω_L t})`. The closed-form
//! counterdiabatic matrix is written in terms of the full rotation angle
//! `ϑ = 2β`; see [`cd_beyond_rwa`].

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::branch::{principal_atan, unwrap_to};
use crate::error::{require, NumResult, NumericError, ParamError};
use crate::linalg::{eigenvalues2, inner, ComplexMatrix2, Matrix, Vector, C64, I};
use crate::propagator::Hamiltonian;
use crate::pulses::{ae_drive, AeParams};
use crate::units;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TwoLevelParams {
    /// Decay rate Γ of `|2⟩` [rad/s].
    #[serde(deserialize_with = "units::frequency")]
    pub gamma: f64,
    /// Laser carrier ω_L [rad/s].
    #[serde(deserialize_with = "units::frequency")]
    pub omega_l: f64,
    pub pulse: AeParams,
    /// Keep the `e^{−2iω_L t}` terms in the coupling.
    pub counter_rotating: bool,
}

impl TwoLevelParams {
    pub fn validate(&self) -> Result<(), ParamError> {
        require(self.gamma >= 0.0, "gamma", "must be >= 0")?;
        require(self.omega_l >= 0.0, "omegaL", "must be >= 0")?;
        self.pulse.validate().map_err(|e| e.within("pulse"))
    }

    /// Carrier frequency seen by the eigenstate phases: ω_L beyond the RWA,
    /// zero under it.
    pub fn phase_frequency(&self) -> f64 {
        if self.counter_rotating {
            self.omega_l
        } else {
            0.0
        }
    }

    /// Real coupling `X` in the mixing-angle argument and its derivative.
    pub fn coupling(&self, t: f64) -> (f64, f64) {
        let (rabi, _) = ae_drive(t, &self.pulse);
        let (r, rd) = (rabi.value.re, rabi.derivative.re);
        if self.counter_rotating {
            let w = self.omega_l;
            let (s, c) = (w * t).sin_cos();
            (2.0 * r * c, 2.0 * rd * c - 2.0 * r * w * s)
        } else {
            (r, rd)
        }
    }

    pub fn fastest_frequency(&self) -> f64 {
        let p = &self.pulse;
        let x_max = std::f64::consts::PI * p.tf / (4.0 * p.t0);
        let detuning = p.chirp_amplitude() * x_max.tanh();
        let (carrier, rabi) = if self.counter_rotating {
            (2.0 * self.omega_l, 2.0 * p.omega0)
        } else {
            (0.0, p.omega0)
        };
        carrier.max(detuning).max(rabi).max(self.gamma)
    }

    fn shifted_detuning(&self, t: f64) -> (C64, C64) {
        let (_, det) = ae_drive(t, &self.pulse);
        (C64::new(det.value.re, -self.gamma / 2.0), det.derivative)
    }
}

/// Complex mixing angle with its time derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixingAngle {
    pub beta: C64,
    pub beta_dot: C64,
    /// `k` such that `beta = principal + k·π/2`.
    pub branch_index: i64,
}

impl MixingAngle {
    pub fn new(beta: C64, beta_dot: C64) -> Self {
        MixingAngle {
            beta,
            beta_dot,
            branch_index: 0,
        }
    }
}

/// Right eigenstates `|φ₊⟩, |φ₋⟩` and their biorthogonal partners.
/// Index 0 is `+`, index 1 is `−`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiorthPair2 {
    pub right: [Vector<2>; 2],
    pub left: [Vector<2>; 2],
}

impl BiorthPair2 {
    /// `G_mn = ⟨φ̂_m|φ_n⟩`.
    pub fn gram(&self) -> ComplexMatrix2 {
        let mut g = Matrix::zeros();
        for m in 0..2 {
            for n in 0..2 {
                g[(m, n)] = inner(&self.left[m], &self.right[n]);
            }
        }
        g
    }
}

/// Reference Hamiltonian `½[[−Δ, Ω], [Ω, Δ − iΓ]]`.
///
/// Beyond the RWA `Ω = Ω_R(1 + e^{−2iω_L t})`. Both off-diagonal entries
/// carry the same `Ω`, so the matrix is complex symmetric.
pub fn hamiltonian(t: f64, p: &TwoLevelParams) -> ComplexMatrix2 {
    let (rabi, det) = ae_drive(t, &p.pulse);
    let omega = if p.counter_rotating {
        rabi.value * (1.0 + (-2.0 * I * p.omega_l * t).exp())
    } else {
        rabi.value
    };
    let d = det.value;
    Matrix::from_rows([[-d, omega], [omega, d - I * p.gamma]]) * 0.5
}

/// Mixing angle `β = ½ arctan[X/(Δ − iΓ/2)]` on the principal branch, or
/// continued from `prev` by multiples of π/2.
pub fn mixing_angle(t: f64, p: &TwoLevelParams, prev: Option<&MixingAngle>) -> NumResult<MixingAngle> {
    let (x, xd) = p.coupling(t);
    let (z, zd) = p.shifted_detuning(t);
    let (x, xd) = (C64::new(x, 0.0), C64::new(xd, 0.0));

    let (beta, beta_dot) = if x.norm() == 0.0 && z.norm() == 0.0 {
        (C64::new(0.0, 0.0), C64::new(0.0, 0.0))
    } else if x.norm() <= z.norm() {
        let u = x / z;
        let ud = (xd * z - x * zd) / (z * z);
        let s = 1.0 + u * u;
        if s.norm() < 1e-12 {
            return Err(NumericError::SingularAngle { t });
        }
        (0.5 * principal_atan(u), ud / (2.0 * s))
    } else {
        // arctan u = ±π/2 − arctan(1/u), sign of Re u
        let w = z / x;
        let wd = (zd * x - z * xd) / (x * x);
        let s = 1.0 + w * w;
        if s.norm() < 1e-12 {
            return Err(NumericError::SingularAngle { t });
        }
        let quarter = if w.re < 0.0 { -FRAC_PI_2 } else { FRAC_PI_2 };
        (0.5 * (quarter - principal_atan(w)), -wd / (2.0 * s))
    };

    let (beta, branch_index) = match prev {
        Some(prev) => unwrap_to(beta, prev.beta, FRAC_PI_2),
        None => (beta, 0),
    };
    Ok(MixingAngle {
        beta,
        beta_dot,
        branch_index,
    })
}

/// Mixing angles along a time grid with branch continuity.
pub fn mixing_angle_series(times: &[f64], p: &TwoLevelParams) -> NumResult<Vec<MixingAngle>> {
    let mut out: Vec<MixingAngle> = Vec::with_capacity(times.len());
    for &t in times {
        let m = mixing_angle(t, p, out.last())?;
        out.push(m);
    }
    Ok(out)
}

/// `|φ₊⟩ = (sin β, cos β e^{iωt})`, `|φ₋⟩ = (cos β e^{−iωt}, −sin β)`; the
/// partner kets use `β*`.
pub fn eigenstates(beta: &MixingAngle, omega_l: f64, t: f64) -> BiorthPair2 {
    let states = |b: C64| -> [Vector<2>; 2] {
        let (s, c) = (b.sin(), b.cos());
        let ph = (I * omega_l * t).exp();
        [[s, c * ph], [c / ph, -s]]
    };
    BiorthPair2 {
        right: states(beta.beta),
        left: states(beta.beta.conj()),
    }
}

/// Analytic `∂_t|φ₊⟩, ∂_t|φ₋⟩`.
pub fn eigenstate_derivatives(beta: &MixingAngle, omega_l: f64, t: f64) -> [Vector<2>; 2] {
    let (b, bd, w) = (beta.beta, beta.beta_dot, omega_l);
    let (s, c) = (b.sin(), b.cos());
    let ph = (I * w * t).exp();
    [
        [bd * c, (-bd * s + I * w * c) * ph],
        [(-bd * s - I * w * c) / ph, -bd * c],
    ]
}

/// `iΣ_n [|∂φ_n⟩⟨φ̂_n| − ⟨φ̂_n|∂φ_n⟩ |φ_n⟩⟨φ̂_n|]`.
pub fn cd_general(pair: &BiorthPair2, pair_dot: &[Vector<2>; 2]) -> ComplexMatrix2 {
    let mut m = Matrix::zeros();
    for n in 0..2 {
        let (r, l, d) = (&pair.right[n], &pair.left[n], &pair_dot[n]);
        m += Matrix::outer(d, l) - Matrix::outer(r, l) * inner(l, d);
    }
    m * I
}

/// Closed-form counterdiabatic term beyond the RWA,
///
/// `[[ (ω/2)sin²ϑ, (iϑ̇/2 + (ω/4)sin 2ϑ)e^{−iωt} ], [ (−iϑ̇/2 + (ω/4)sin 2ϑ)e^{iωt}, −(ω/2)sin²ϑ ]]`
///
/// with `ϑ = 2β`. The matrix is invariant under `β → β + π/2`.
pub fn cd_beyond_rwa(beta: &MixingAngle, omega_l: f64, t: f64) -> ComplexMatrix2 {
    let th = 2.0 * beta.beta;
    let thd = 2.0 * beta.beta_dot;
    let w = omega_l;
    let diag = 0.5 * w * th.sin() * th.sin();
    let cross = 0.25 * w * (2.0 * th).sin();
    let ph = (I * w * t).exp();
    Matrix::from_rows([
        [diag, (0.5 * I * thd + cross) / ph],
        [(-0.5 * I * thd + cross) * ph, -diag],
    ])
}

/// RWA auxiliary field `Ω_a = iθ̇/2` and `H_CD = [[0, Ω_a], [−Ω_a, 0]]` with
/// `θ̇ = [Ω̇_R(Δ − iΓ/2) − Ω_R Δ̇] / [Ω_R² + (Δ − iΓ/2)²]` (Γ constant).
pub fn cd_rwa(t: f64, p: &TwoLevelParams) -> NumResult<(C64, ComplexMatrix2)> {
    let (rabi, det) = ae_drive(t, &p.pulse);
    let (r, rd) = (rabi.value, rabi.derivative);
    let gamma_dot = 0.0;
    let z = det.value - 0.5 * I * p.gamma;
    let zd = det.derivative - 0.5 * I * gamma_dot;
    let denom = r * r + z * z;
    if denom.norm() < 1e-12 * r.norm_sqr().max(z.norm_sqr()) || denom.norm() == 0.0 {
        return Err(NumericError::ExceptionalPoint { t });
    }
    let theta_dot = (rd * z - r * zd) / denom;
    let omega_a = 0.5 * I * theta_dot;
    Ok((
        omega_a,
        Matrix::from_rows([[C64::new(0.0, 0.0), omega_a], [-omega_a, C64::new(0.0, 0.0)]]),
    ))
}

/// Keep only the imaginary part, `Ω_a ≃ i·Im Ω_a`.
pub fn imag_only_approximation(omega_a: C64) -> C64 {
    C64::new(0.0, omega_a.im)
}

/// Largest `‖H|φ_±⟩ − λ|φ_±⟩‖` over both states, with `λ` the closer of the
/// two exact eigenvalues of `H`. Diagnostic only: beyond the RWA the closed-form
/// states are not exact eigenvectors of the complex-symmetric Hamiltonian.
pub fn eigen_residual(t: f64, p: &TwoLevelParams, beta: &MixingAngle) -> f64 {
    let h = hamiltonian(t, p);
    let lambdas = eigenvalues2(&h);
    let pair = eigenstates(beta, p.phase_frequency(), t);
    pair.right
        .iter()
        .map(|v| {
            let hv = h.mul_vec(v);
            lambdas
                .iter()
                .map(|&l| ((hv[0] - l * v[0]).norm_sqr() + (hv[1] - l * v[1]).norm_sqr()).sqrt())
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}

/// Counterdiabatic term added to the two-level reference.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TwoLevelCd {
    None,
    Rwa { imag_only: bool },
    BeyondRwa,
}

/// Reference Hamiltonian plus a counterdiabatic term, ready to propagate.
#[derive(Debug, Clone, Copy)]
pub struct TwoLevelSystem {
    pub params: TwoLevelParams,
    pub cd: TwoLevelCd,
}

impl TwoLevelSystem {
    pub fn cd_matrix(&self, t: f64) -> NumResult<ComplexMatrix2> {
        Ok(match self.cd {
            TwoLevelCd::None => Matrix::zeros(),
            TwoLevelCd::Rwa { imag_only: false } => cd_rwa(t, &self.params)?.1,
            TwoLevelCd::Rwa { imag_only: true } => {
                let a = imag_only_approximation(cd_rwa(t, &self.params)?.0);
                Matrix::from_rows([[C64::new(0.0, 0.0), a], [-a, C64::new(0.0, 0.0)]])
            }
            TwoLevelCd::BeyondRwa => {
                let beta = mixing_angle(t, &self.params, None)?;
                cd_beyond_rwa(&beta, self.params.phase_frequency(), t)
            }
        })
    }
}

impl Hamiltonian<2> for TwoLevelSystem {
    fn at(&self, t: f64) -> NumResult<ComplexMatrix2> {
        Ok(hamiltonian(t, &self.params) + self.cd_matrix(t)?)
    }

    fn fastest_frequency(&self) -> f64 {
        self.params.fastest_frequency()
    }
}
