//! Counterdiabatic control of decaying two- and three-level quantum systems,
//! with and without the rotating-wave approximation.
//!
//! Units throughout: ħ = 1, angular frequencies in rad/s, times in s.

pub mod branch;
pub mod effective;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod propagator;
pub mod pulses;
pub mod three_level;
pub mod two_level;
pub mod units;

pub use error::{NumResult, NumericError, ParamError};
pub use linalg::{ComplexMatrix2, ComplexMatrix3, Matrix, Vector, C64};
pub use propagator::{evolve, Hamiltonian, IntegratorSpec, Level, Method, Trajectory};
