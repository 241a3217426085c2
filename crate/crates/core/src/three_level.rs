//! Decaying Λ system: pump couples `|1⟩–|2⟩`, Stokes couples `|2⟩–|3⟩`, and
//! the excited state `|2⟩` decays at rate Γ.
//!
//! Eigen-decomposition and counterdiabatic terms assume two-photon resonance
//! `Δ_p = Δ_s = Δ`. Eigenstates are indexed `0` (dark), `1` (`+`), `2` (`−`),
//! with energies `0`, `ε₊/2`, `ε₋/2`.

use serde::{Deserialize, Serialize};

use crate::error::{require, NumResult, NumericError, ParamError};
use crate::linalg::{inner, ComplexMatrix3, Matrix, Vector, C64, I};
use crate::propagator::Hamiltonian;
use crate::pulses::{dress_counter_rotating, gaussian_pair, GaussianPairParams, PulseSample};
use crate::units;

/// Below `XI0_CUTOFF·Ω₀` the pulses are treated as off and the
/// counterdiabatic term vanishes.
pub const XI0_CUTOFF: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ThreeLevelParams {
    #[serde(deserialize_with = "units::frequency")]
    pub gamma: f64,
    #[serde(deserialize_with = "units::frequency")]
    pub delta_p: f64,
    #[serde(deserialize_with = "units::frequency")]
    pub delta_s: f64,
    /// Pump carrier [rad/s].
    #[serde(deserialize_with = "units::frequency")]
    pub omega_p: f64,
    /// Stokes carrier [rad/s].
    #[serde(deserialize_with = "units::frequency")]
    pub omega_s: f64,
    pub pulses: GaussianPairParams,
    pub counter_rotating: bool,
}

impl ThreeLevelParams {
    pub fn validate(&self) -> Result<(), ParamError> {
        require(self.gamma >= 0.0, "gamma", "must be >= 0")?;
        require(self.delta_p.is_finite(), "deltaP", "must be finite")?;
        require(self.delta_s.is_finite(), "deltaS", "must be finite")?;
        require(self.omega_p >= 0.0, "omegaP", "must be >= 0")?;
        require(self.omega_s >= 0.0, "omegaS", "must be >= 0")?;
        self.pulses.validate().map_err(|e| e.within("pulses"))
    }

    /// The common detuning, or `OffResonance` when `Δ_p ≠ Δ_s`.
    pub fn resonant_detuning(&self) -> NumResult<f64> {
        let (dp, ds) = (self.delta_p, self.delta_s);
        if (dp - ds).abs() > 1e-12 * dp.abs().max(ds.abs()) {
            return Err(NumericError::OffResonance {
                delta_p: dp,
                delta_s: ds,
            });
        }
        Ok(dp)
    }

    /// Pump and Stokes couplings `(Ω̄_p, Ω̄_s)` with derivatives.
    pub fn dressed(&self, t: f64) -> (PulseSample, PulseSample) {
        let (p, s) = gaussian_pair(t, &self.pulses);
        if self.counter_rotating {
            (
                dress_counter_rotating(p, self.omega_p, t),
                dress_counter_rotating(s, self.omega_s, t),
            )
        } else {
            (p, s)
        }
    }

    pub fn fastest_frequency(&self) -> f64 {
        let o = self.pulses.omega0;
        let (carrier, rabi) = if self.counter_rotating {
            (2.0 * self.omega_p.max(self.omega_s), 2.0 * o)
        } else {
            (0.0, o)
        };
        carrier
            .max(rabi)
            .max(2.0 * self.delta_p.abs() + self.gamma)
            .max((self.delta_p - self.delta_s).abs())
    }
}

/// `½[[0, Ω̄_p, 0], [Ω̄_p*, 2Δ_p − iΓ, Ω̄_s], [0, Ω̄_s*, 2(Δ_p − Δ_s)]]`.
pub fn hamiltonian(t: f64, p: &ThreeLevelParams) -> ComplexMatrix3 {
    let (pump, stokes) = p.dressed(t);
    let (op, os) = (pump.value, stokes.value);
    let z = C64::new(0.0, 0.0);
    Matrix::from_rows([
        [z, op, z],
        [op.conj(), C64::new(2.0 * p.delta_p, -p.gamma), os],
        [z, os.conj(), C64::new(2.0 * (p.delta_p - p.delta_s), 0.0)],
    ]) * 0.5
}

/// `∂_t H̄₀` from the analytic pulse derivatives (Γ and detunings constant).
pub fn h0dot(t: f64, p: &ThreeLevelParams) -> ComplexMatrix3 {
    let (pump, stokes) = p.dressed(t);
    let (dp, ds) = (pump.derivative, stokes.derivative);
    let z = C64::new(0.0, 0.0);
    Matrix::from_rows([[z, dp, z], [dp.conj(), z, ds], [z, ds.conj(), z]]) * 0.5
}

/// `Ξ₀ = √(|Ω̄_p|² + |Ω̄_s|²)`.
pub fn xi0(t: f64, p: &ThreeLevelParams) -> f64 {
    let (pump, stokes) = p.dressed(t);
    (pump.value.norm_sqr() + stokes.value.norm_sqr()).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eigensystem3 {
    /// `|E₀⟩, |E₊⟩, |E₋⟩`.
    pub right: [Vector<3>; 3],
    /// Biorthogonal partners, scaled so that `⟨Ê_j|E_k⟩ = δ_jk`.
    pub left: [Vector<3>; 3],
    /// `ε₊, ε₋`.
    pub eps: [C64; 2],
    /// `ε̂₊, ε̂₋`, the roots with `Γ → −Γ`.
    pub eps_hat: [C64; 2],
    /// `Ξ₀, Ξ₁, Ξ₂`.
    pub xi: [C64; 3],
    /// `E₀ = 0, E_± = ε_±/2`.
    pub energies: [C64; 3],
}

impl Eigensystem3 {
    /// `⟨Ê_±|E_±⟩` when the partner kets are divided by `Ξ₁, Ξ₂` instead of
    /// their conjugates. Equals `Ξ²/|Ξ|²`, which is 1 only for real `Ξ`.
    pub fn unconjugated_pairing(&self) -> [C64; 2] {
        [1, 2].map(|k| {
            let x = self.xi[k];
            x * x / x.norm_sqr()
        })
    }

    /// `G_jk = ⟨Ê_j|E_k⟩`.
    pub fn gram(&self) -> ComplexMatrix3 {
        let mut g = Matrix::zeros();
        for j in 0..3 {
            for k in 0..3 {
                g[(j, k)] = inner(&self.left[j], &self.right[k]);
            }
        }
        g
    }
}

fn pick_sign(root: C64, reference: Option<C64>) -> C64 {
    match reference {
        Some(r) if (root + r).norm() < (root - r).norm() => -root,
        _ => root,
    }
}

/// Eigensystem with every square root on the principal branch.
pub fn eigensystem(t: f64, p: &ThreeLevelParams) -> NumResult<Eigensystem3> {
    eigensystem_tracked(t, p, None)
}

/// Eigensystem whose square roots are chosen closest to `prev`.
pub fn eigensystem_tracked(t: f64, p: &ThreeLevelParams, prev: Option<&Eigensystem3>) -> NumResult<Eigensystem3> {
    let delta = p.resonant_detuning()?;
    let (pump, stokes) = p.dressed(t);
    let (op, os) = (pump.value, stokes.value);
    let xi0_sq = op.norm_sqr() + os.norm_sqr();
    let x0 = xi0_sq.sqrt();
    if x0 <= f64::EPSILON * p.pulses.omega0 {
        return Err(NumericError::DegenerateDark { t });
    }

    let z = C64::new(delta, -p.gamma / 2.0);
    let disc = z * z + xi0_sq;
    if disc.norm() < 1e-10 * z.norm_sqr().max(xi0_sq) {
        return Err(NumericError::ExceptionalPoint { t });
    }
    let root = pick_sign(disc.sqrt(), prev.map(|e| e.eps[0] - z));
    let eps = [z + root, z - root];

    let zh = z.conj();
    let root_hat = pick_sign((zh * zh + xi0_sq).sqrt(), Some(root.conj()));
    let eps_hat = [zh + root_hat, zh - root_hat];

    let mut xi = [C64::new(x0, 0.0); 3];
    for k in 0..2 {
        let sq = eps[k] * eps[k] + xi0_sq;
        if sq.norm() < 1e-10 * xi0_sq {
            return Err(NumericError::Singular {
                what: "eigenvector normalizer",
                t,
            });
        }
        xi[k + 1] = pick_sign(sq.sqrt(), prev.map(|e| e.xi[k + 1]));
    }

    let dark = [os / x0, C64::new(0.0, 0.0), -op.conj() / x0];
    let mut right = [dark; 3];
    let mut left = [dark; 3];
    for k in 0..2 {
        let n = xi[k + 1];
        right[k + 1] = [op / n, eps[k] / n, os.conj() / n];
        left[k + 1] = [op / n.conj(), eps_hat[k] / n.conj(), os.conj() / n.conj()];
    }

    Ok(Eigensystem3 {
        right,
        left,
        eps,
        eps_hat,
        xi,
        energies: [C64::new(0.0, 0.0), eps[0] / 2.0, eps[1] / 2.0],
    })
}

/// Eigensystems along a time grid with continuous square-root branches.
pub fn eigensystem_series(times: &[f64], p: &ThreeLevelParams) -> NumResult<Vec<Eigensystem3>> {
    let mut out: Vec<Eigensystem3> = Vec::with_capacity(times.len());
    for &t in times {
        let e = eigensystem_tracked(t, p, out.last())?;
        out.push(e);
    }
    Ok(out)
}

/// Dark-state partner ket `|Ê₀⟩ = (Ω̄_s, 0, −Ω̄_p*)/Ξ₀`.
pub fn dark_state(t: f64, p: &ThreeLevelParams) -> NumResult<Vector<3>> {
    let (pump, stokes) = p.dressed(t);
    let (op, os) = (pump.value, stokes.value);
    let x0 = (op.norm_sqr() + os.norm_sqr()).sqrt();
    if x0 <= f64::EPSILON * p.pulses.omega0 {
        return Err(NumericError::DegenerateDark { t });
    }
    Ok([os / x0, C64::new(0.0, 0.0), -op.conj() / x0])
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectorSet3 {
    pub pi: [ComplexMatrix3; 3],
}

/// Oblique projectors `Π_j = |E_j⟩⟨Ê_j|`.
pub fn projectors(es: &Eigensystem3) -> ProjectorSet3 {
    ProjectorSet3 {
        pi: [0, 1, 2].map(|j| Matrix::outer(&es.right[j], &es.left[j])),
    }
}

/// `iΣ_{j≠k} Π_j ∂_tH̄₀ Π_k / (E_k − E_j)`.
pub fn cd_projector_formula(
    t: f64,
    es: &Eigensystem3,
    ps: &ProjectorSet3,
    h0dot: &ComplexMatrix3,
) -> NumResult<ComplexMatrix3> {
    let e = &es.energies;
    let scale = e.iter().map(|x| x.norm()).fold(0.0, f64::max);
    let mut m = Matrix::zeros();
    for j in 0..3 {
        for k in 0..3 {
            if j == k {
                continue;
            }
            let gap = e[k] - e[j];
            if gap.norm() <= 1e-12 * scale {
                return Err(NumericError::ExceptionalPoint { t });
            }
            m += ps.pi[j] * *h0dot * ps.pi[k] * (1.0 / gap);
        }
    }
    Ok(m * I)
}

/// Projector-sum counterdiabatic term at `t`, zero once the pulses are off.
pub fn cd_projector(t: f64, p: &ThreeLevelParams) -> NumResult<ComplexMatrix3> {
    if xi0(t, p) < XI0_CUTOFF * p.pulses.omega0 {
        return Ok(Matrix::zeros());
    }
    let es = eigensystem(t, p)?;
    cd_projector_formula(t, &es, &projectors(&es), &h0dot(t, p))
}

/// Coefficients `A … G` of the closed-form counterdiabatic matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormCoefficients {
    pub a: C64,
    pub b: C64,
    pub c: C64,
    pub d: C64,
    pub f: C64,
    pub g: C64,
}

/// Coefficients exactly as written, with each "− H.C." taken as `z − z*`.
pub fn closed_form_coefficients(t: f64, p: &ThreeLevelParams, es: &Eigensystem3) -> ClosedFormCoefficients {
    let (pump, stokes) = p.dressed(t);
    let (op, dp, os, ds) = (pump.value, pump.derivative, stokes.value, stokes.derivative);
    let xi0_sq = es.xi[0].norm_sqr();
    let two_z = C64::new(2.0 * p.delta_p, -p.gamma);
    let hc = |z: C64| z - z.conj();

    let a = two_z * (op.conj() * dp + os * ds.conj());
    let b = hc(op.conj() * dp.conj() + os * ds.conj());
    let c = C64::new(
        (es.eps[0].norm_sqr() + es.eps[1].norm_sqr() + 2.0 * xi0_sq) / xi0_sq,
        0.0,
    );
    let d = op.norm_sqr() * hc(os.conj() * ds.conj()) + os.norm_sqr() * hc(op.conj() * dp);
    let f = op * op * (os * dp.conj() - op.conj() * ds.conj()) + os * os * (os.conj() * dp - op * ds.conj());
    let g = os.conj() * dp - op * ds.conj();
    ClosedFormCoefficients { a, b, c, d, f, g }
}

/// The closed-form counterdiabatic matrix with prefactor `i/(Ξ₁²Ξ₂²)`.
pub fn cd_closed_form(t: f64, p: &ThreeLevelParams, es: &Eigensystem3) -> ComplexMatrix3 {
    let (pump, stokes) = p.dressed(t);
    let (op, os) = (pump.value, stokes.value);
    let ClosedFormCoefficients { a, b, c, d, f, g } = closed_form_coefficients(t, p, es);
    let gam = C64::new(0.0, 2.0 * p.gamma);
    let xi0_sq = es.xi[0].norm_sqr();
    let m = Matrix::from_rows([
        [op.norm_sqr() * b + c * d, op * a - gam * os * g, op * os * b + c * f],
        [
            -op.conj() * a.conj() - gam * os.conj() * g.conj(),
            -xi0_sq * b,
            -os * a.conj() - gam * op * g.conj(),
        ],
        [
            -op.conj() * os.conj() * b.conj() - c * f.conj(),
            os.conj() * a + gam * op.conj() * g,
            os.norm_sqr() * b - c * d,
        ],
    ]);
    let x1 = es.xi[1] * es.xi[1];
    let x2 = es.xi[2] * es.xi[2];
    m * (I / (x1 * x2))
}

/// RWA auxiliary driving `i[[0, A, C], [−A, 0, −B], [−C, B, 0]]` with
/// `A = sin θ·φ̇`, `B = cos θ·φ̇`, `C = θ̇`, `tan θ = Ω_p/Ω_s` and
/// `φ̇ = Ω̇'(Δ − iΓ/2) / (2[Ω'² + (Δ − iΓ/2)²])`, `Ω'² = Ω_p² + Ω_s²`.
/// Uses the bare Gaussians whatever `counter_rotating` says.
pub fn cd_rwa(t: f64, p: &ThreeLevelParams) -> NumResult<ComplexMatrix3> {
    let (pump, stokes) = gaussian_pair(t, &p.pulses);
    let (op, dp, os, ds) = (pump.value.re, pump.derivative.re, stokes.value.re, stokes.derivative.re);
    let prime_sq = op * op + os * os;
    let prime = prime_sq.sqrt();
    if prime < XI0_CUTOFF * p.pulses.omega0 {
        return Ok(Matrix::zeros());
    }
    let prime_dot = (op * dp + os * ds) / prime;
    let theta = op.atan2(os);
    let theta_dot = (dp * os - ds * op) / prime_sq;

    let z = C64::new(p.delta_p, -p.gamma / 2.0);
    let z_dot = C64::new(0.0, 0.0);
    let denom = prime_sq + z * z;
    if denom.norm() < 1e-10 * prime_sq.max(z.norm_sqr()) {
        return Err(NumericError::ExceptionalPoint { t });
    }
    let phi_dot = (prime_dot * z - prime * z_dot) / (2.0 * denom);

    let a = theta.sin() * phi_dot;
    let b = theta.cos() * phi_dot;
    let c = C64::new(theta_dot, 0.0);
    let zero = C64::new(0.0, 0.0);
    Ok(Matrix::from_rows([[zero, a, c], [-a, zero, -b], [-c, b, zero]]) * I)
}

/// Largest `‖H̄₀|E_n⟩ − E_n|E_n⟩‖` over the three eigenstates.
pub fn eigen_residual(t: f64, p: &ThreeLevelParams, es: &Eigensystem3) -> f64 {
    let h = hamiltonian(t, p);
    (0..3)
        .map(|n| {
            let v = &es.right[n];
            let hv = h.mul_vec(v);
            (0..3)
                .map(|i| (hv[i] - es.energies[n] * v[i]).norm_sqr())
                .sum::<f64>()
                .sqrt()
        })
        .fold(0.0, f64::max)
}

/// Counterdiabatic term added to the Λ-system reference.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThreeLevelCd {
    None,
    Rwa,
    Projector,
}

#[derive(Debug, Clone, Copy)]
pub struct ThreeLevelSystem {
    pub params: ThreeLevelParams,
    pub cd: ThreeLevelCd,
}

impl ThreeLevelSystem {
    pub fn cd_matrix(&self, t: f64) -> NumResult<ComplexMatrix3> {
        match self.cd {
            ThreeLevelCd::None => Ok(Matrix::zeros()),
            ThreeLevelCd::Rwa => cd_rwa(t, &self.params),
            ThreeLevelCd::Projector => cd_projector(t, &self.params),
        }
    }
}

impl Hamiltonian<3> for ThreeLevelSystem {
    fn at(&self, t: f64) -> NumResult<ComplexMatrix3> {
        Ok(hamiltonian(t, &self.params) + self.cd_matrix(t)?)
    }

    fn fastest_frequency(&self) -> f64 {
        self.params.fastest_frequency()
    }
}
