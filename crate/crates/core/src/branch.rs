//! Branch cuts and continuity tracking for multivalued complex functions.
//!
//! A mixing angle built from a complex arctangent jumps by π whenever its
//! argument crosses the cut on the imaginary axis beyond ±i, and a complex
//! square root flips sign when its argument crosses the negative real axis.
//! Along a trajectory both are unwrapped by picking, among the admissible
//! values, the one closest to the previous sample.

use std::f64::consts::FRAC_PI_2;

use crate::linalg::{C64, I};

/// Principal complex arctangent, `arctan z = (1/2i)·log((1 + iz)/(1 − iz))`.
///
/// Undefined at `z = ±i`; returns a non-finite value there.
pub fn principal_atan(z: C64) -> C64 {
    let one = C64::new(1.0, 0.0);
    ((one + I * z) / (one - I * z)).ln() / (2.0 * I)
}

/// Shift `value` by an integer multiple of `period` so that it lands as close
/// as possible to `reference`. Returns the shifted value and the multiple.
pub fn unwrap_to(value: C64, reference: C64, period: f64) -> (C64, i64) {
    let k = ((reference.re - value.re) / period).round();
    (value + k * period, k as i64)
}

/// Tracks a complex half-angle (`½·arctan`) whose admissible values differ
/// by multiples of π/2.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct HalfAngleTracker {
    last: Option<C64>,
    branch: i64,
}

impl HalfAngleTracker {
    pub fn new() -> Self {
        Self::default()
    }

    /// Feed the principal value; get back the continuous value.
    pub fn follow(&mut self, principal: C64) -> C64 {
        let (v, k) = match self.last {
            Some(prev) => unwrap_to(principal, prev, FRAC_PI_2),
            None => (principal, 0),
        };
        self.last = Some(v);
        self.branch = k;
        v
    }

    /// Cumulative branch index relative to the principal value of the most
    /// recent sample.
    pub fn branch(&self) -> i64 {
        self.branch
    }
}

/// Chooses the sign of a complex square root to stay continuous with the
/// previously returned root.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RootTracker {
    last: Option<C64>,
}

impl RootTracker {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn follow(&mut self, principal: C64) -> C64 {
        let v = match self.last {
            Some(prev) if (principal + prev).norm() < (principal - prev).norm() => -principal,
            _ => principal,
        };
        self.last = Some(v);
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn atan_matches_real_arctan_on_real_axis() {
        for &x in &[-3.0, -1.0, -0.2, 0.0, 0.5, 1.0, 10.0] {
            let z = principal_atan(C64::new(x, 0.0));
            assert!((z.re - f64::atan(x)).abs() < 1e-14, "x = {x}");
            assert!(z.im.abs() < 1e-14);
        }
    }

    #[test]
    fn atan_inverts_tan() {
        let z = C64::new(0.3, -0.7);
        let w = principal_atan(z);
        assert!((w.tan() - z).norm() < 1e-13);
    }

    #[test]
    fn atan_agrees_with_num_complex_off_the_cut() {
        for &(re, im) in &[(0.4, 0.2), (-2.0, 0.5), (3.0, -4.0), (0.0, 0.5)] {
            let z = C64::new(re, im);
            assert!((principal_atan(z) - z.atan()).norm() < 1e-13, "z = {z}");
        }
    }

    #[test]
    fn atan_is_singular_at_i() {
        assert!(!principal_atan(I).is_finite());
    }

    #[test]
    fn half_angle_tracker_removes_jumps() {
        let mut tr = HalfAngleTracker::new();
        assert_eq!(tr.follow(C64::new(0.7, 0.1)), C64::new(0.7, 0.1));
        // principal value jumped by -π/2
        let v = tr.follow(C64::new(0.75 - PI / 2.0, 0.1));
        assert!((v - C64::new(0.75, 0.1)).norm() < 1e-14);
        assert_eq!(tr.branch(), 1);
    }

    #[test]
    fn root_tracker_keeps_sign() {
        let mut tr = RootTracker::new();
        let a = tr.follow(C64::new(1.0, 0.01));
        let b = tr.follow(C64::new(-0.99, -0.02));
        assert!((a - b).norm() < 0.05);
    }
}
