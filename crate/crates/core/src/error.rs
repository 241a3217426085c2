use thiserror::Error;

/// Failures of the numerical kernels. Every variant carries the time at
/// which the failure was detected.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericError {
    #[error("mixing angle is singular at t = {t:e} s (arctan branch point, 1 + u² = 0)")]
    SingularAngle { t: f64 },
    #[error("exceptional point at t = {t:e} s: eigenvalues coalesce")]
    ExceptionalPoint { t: f64 },
    #[error("dark state undefined at t = {t:e} s: both pulses vanish")]
    DegenerateDark { t: f64 },
    #[error("{what} is singular at t = {t:e} s")]
    Singular { what: &'static str, t: f64 },
    #[error("two-photon resonance required (Δp = {delta_p:e}, Δs = {delta_s:e})")]
    OffResonance { delta_p: f64, delta_s: f64 },
    #[error("time step {dt:e} s exceeds the carrier bound {max_dt:e} s")]
    StepTooCoarse { dt: f64, max_dt: f64 },
    #[error("state amplitude became non-finite at t = {t:e} s")]
    NonFinite { t: f64 },
    #[error("initial state is not normalized (‖ψ₀‖ = {norm})")]
    NotNormalized { norm: f64 },
}

impl NumericError {
    /// Time of failure, where one applies.
    pub fn time(&self) -> Option<f64> {
        match *self {
            NumericError::SingularAngle { t }
            | NumericError::ExceptionalPoint { t }
            | NumericError::DegenerateDark { t }
            | NumericError::Singular { t, .. }
            | NumericError::NonFinite { t } => Some(t),
            NumericError::OffResonance { .. }
            | NumericError::StepTooCoarse { .. }
            | NumericError::NotNormalized { .. } => None,
        }
    }
}

pub type NumResult<T> = Result<T, NumericError>;

/// A parameter record violates one of its invariants.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("invalid parameter `{field}`: {reason}")]
pub struct ParamError {
    pub field: String,
    pub reason: String,
}

impl ParamError {
    pub fn new(field: impl Into<String>, reason: impl Into<String>) -> Self {
        ParamError {
            field: field.into(),
            reason: reason.into(),
        }
    }

    /// Prefix the field path, e.g. `omega0` → `system.pulse.omega0`.
    pub fn within(mut self, parent: &str) -> Self {
        self.field = format!("{parent}.{}", self.field);
        self
    }
}

pub(crate) fn require(cond: bool, field: &str, reason: &str) -> Result<(), ParamError> {
    if cond {
        Ok(())
    } else {
        Err(ParamError::new(field, reason))
    }
}
