//! Small dense complex matrices and vectors.
//!
//! Everything in this crate lives in a 2- or 3-dimensional Hilbert space, so
//! matrices are stack-allocated `[[C64; N]; N]` arrays behind a const-generic
//! newtype rather than heap-backed dynamic arrays.

use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub};

pub use num_complex::Complex64 as C64;

/// Imaginary unit.
pub const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Complex column vector of dimension `N`.
pub type Vector<const N: usize> = [C64; N];

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn real(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Dense complex square matrix.
#[derive(Clone, Copy, PartialEq)]
pub struct Matrix<const N: usize>(pub [[C64; N]; N]);

pub type ComplexMatrix2 = Matrix<2>;
pub type ComplexMatrix3 = Matrix<3>;

impl<const N: usize> Matrix<N> {
    pub fn zeros() -> Self {
        Matrix([[C64::new(0.0, 0.0); N]; N])
    }

    pub fn identity() -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            m.0[i][i] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(rows: [[C64; N]; N]) -> Self {
        Matrix(rows)
    }

    pub fn diagonal(d: [C64; N]) -> Self {
        let mut m = Self::zeros();
        for (i, v) in d.into_iter().enumerate() {
            m.0[i][i] = v;
        }
        m
    }

    /// `|a⟩⟨b|`, i.e. `a b†`.
    pub fn outer(a: &Vector<N>, b: &Vector<N>) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            for j in 0..N {
                m.0[i][j] = a[i] * b[j].conj();
            }
        }
        m
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut m = *self;
        for row in m.0.iter_mut() {
            for x in row.iter_mut() {
                *x *= s;
            }
        }
        m
    }

    pub fn dagger(&self) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            for j in 0..N {
                m.0[i][j] = self.0[j][i].conj();
            }
        }
        m
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            for j in 0..N {
                m.0[i][j] = self.0[j][i];
            }
        }
        m
    }

    pub fn trace(&self) -> C64 {
        (0..N).map(|i| self.0[i][i]).sum()
    }

    pub fn mul_vec(&self, v: &Vector<N>) -> Vector<N> {
        let mut out = [C64::new(0.0, 0.0); N];
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.0[i].iter().zip(v.iter()).map(|(a, b)| a * b).sum();
        }
        out
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.0
            .iter()
            .flat_map(|r| r.iter())
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.0
            .iter()
            .flat_map(|r| r.iter())
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flat_map(|r| r.iter()).all(|z| z.is_finite())
    }

    /// Largest entrywise difference, relative to the larger of the two
    /// matrices' largest entries (absolute when both vanish).
    pub fn rel_diff(&self, other: &Self) -> f64 {
        let scale = self.max_abs().max(other.max_abs());
        let d = (*self - *other).max_abs();
        if scale > 0.0 {
            d / scale
        } else {
            d
        }
    }
}

impl<const N: usize> Default for Matrix<N> {
    fn default() -> Self {
        Self::zeros()
    }
}

impl<const N: usize> Index<(usize, usize)> for Matrix<N> {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.0[i][j]
    }
}

impl<const N: usize> IndexMut<(usize, usize)> for Matrix<N> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.0[i][j]
    }
}

impl<const N: usize> Add for Matrix<N> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        self += rhs;
        self
    }
}

impl<const N: usize> AddAssign for Matrix<N> {
    fn add_assign(&mut self, rhs: Self) {
        for i in 0..N {
            for j in 0..N {
                self.0[i][j] += rhs.0[i][j];
            }
        }
    }
}

impl<const N: usize> Sub for Matrix<N> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<const N: usize> Neg for Matrix<N> {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(C64::new(-1.0, 0.0))
    }
}

impl<const N: usize> Mul for Matrix<N> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            for k in 0..N {
                let a = self.0[i][k];
                for j in 0..N {
                    m.0[i][j] += a * rhs.0[k][j];
                }
            }
        }
        m
    }
}

impl<const N: usize> Mul<C64> for Matrix<N> {
    type Output = Self;
    fn mul(self, rhs: C64) -> Self {
        self.scale(rhs)
    }
}

impl<const N: usize> Mul<f64> for Matrix<N> {
    type Output = Self;
    fn mul(self, rhs: f64) -> Self {
        self.scale(C64::new(rhs, 0.0))
    }
}

impl<const N: usize> fmt::Debug for Matrix<N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

/// `⟨a|b⟩ = Σ a_i* b_i`.
pub fn inner<const N: usize>(a: &Vector<N>, b: &Vector<N>) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm_sqr<const N: usize>(v: &Vector<N>) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

pub fn scale_vec<const N: usize>(v: &Vector<N>, s: C64) -> Vector<N> {
    let mut out = *v;
    for x in out.iter_mut() {
        *x *= s;
    }
    out
}

/// `a + s·b`
pub fn axpy<const N: usize>(a: &Vector<N>, s: C64, b: &Vector<N>) -> Vector<N> {
    let mut out = *a;
    for (o, y) in out.iter_mut().zip(b.iter()) {
        *o += s * y;
    }
    out
}

/// Eigenvalues of a general complex 2×2 matrix.
pub fn eigenvalues2(m: &ComplexMatrix2) -> [C64; 2] {
    let half_tr = m.trace() * 0.5;
    let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
    let disc = (half_tr * half_tr - det).sqrt();
    [half_tr + disc, half_tr - disc]
}
