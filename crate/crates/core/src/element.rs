//! Coefficient vectors over a Chevalley basis.

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

/// Coefficient field for algebra elements: exact rationals or complex floats.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Send
    + Sync
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + 'static
{
    fn from_int(n: i64) -> Self;
    /// Complex conjugate (identity on rationals).
    fn conj(&self) -> Self;
    fn abs_f64(&self) -> f64;
}

impl Scalar for Rational64 {
    fn from_int(n: i64) -> Self {
        Rational64::from_integer(n)
    }

    fn conj(&self) -> Self {
        *self
    }

    fn abs_f64(&self) -> f64 {
        (*self.numer() as f64 / *self.denom() as f64).abs()
    }
}

impl Scalar for Complex64 {
    fn from_int(n: i64) -> Self {
        Complex64::new(n as f64, 0.0)
    }

    fn conj(&self) -> Self {
        Complex64::conj(self)
    }

    fn abs_f64(&self) -> f64 {
        self.norm()
    }
}

/// Element of `g^C` as coefficients over the basis `H_1..H_N, R_alpha (alpha in roots)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgebraElement<S> {
    pub coeffs: Vec<S>,
}

pub type ExactElement = AlgebraElement<Rational64>;
pub type FloatElement = AlgebraElement<Complex64>;

impl<S: Scalar> AlgebraElement<S> {
    pub fn zero(dim: usize) -> Self {
        AlgebraElement { coeffs: vec![S::zero(); dim] }
    }

    pub fn basis(dim: usize, i: usize) -> Self {
        let mut e = Self::zero(dim);
        e.coeffs[i] = S::one();
        e
    }

    pub fn from_coeffs(coeffs: Vec<S>) -> Self {
        AlgebraElement { coeffs }
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn scale(&self, s: &S) -> Self {
        AlgebraElement { coeffs: self.coeffs.iter().map(|c| c.clone() * s.clone()).collect() }
    }

    pub fn add_scaled(&mut self, other: &Self, s: &S) {
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += b.clone() * s.clone();
        }
    }

    /// Coefficient-wise complex conjugation.
    pub fn conj_coeffs(&self) -> Self {
        AlgebraElement { coeffs: self.coeffs.iter().map(Scalar::conj).collect() }
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(Scalar::abs_f64).fold(0.0, f64::max)
    }
}

impl FloatElement {
    pub fn from_exact(x: &ExactElement) -> Self {
        AlgebraElement {
            coeffs: x.coeffs.iter().map(|c| Complex64::new(*c.numer() as f64 / *c.denom() as f64, 0.0)).collect(),
        }
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn distance(&self, other: &Self) -> f64 {
        self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt()
    }
}

impl<S: Scalar> Add for AlgebraElement<S> {
    type Output = Self;

    fn add(mut self, rhs: Self) -> Self {
        self += &rhs;
        self
    }
}

impl<S: Scalar> Add<&AlgebraElement<S>> for &AlgebraElement<S> {
    type Output = AlgebraElement<S>;

    fn add(self, rhs: &AlgebraElement<S>) -> AlgebraElement<S> {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl<S: Scalar> Sub for AlgebraElement<S> {
    type Output = Self;

    fn sub(mut self, rhs: Self) -> Self {
        self -= &rhs;
        self
    }
}

impl<S: Scalar> Sub<&AlgebraElement<S>> for &AlgebraElement<S> {
    type Output = AlgebraElement<S>;

    fn sub(self, rhs: &AlgebraElement<S>) -> AlgebraElement<S> {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl<S: Scalar> AddAssign<&AlgebraElement<S>> for AlgebraElement<S> {
    fn add_assign(&mut self, rhs: &AlgebraElement<S>) {
        assert_eq!(self.coeffs.len(), rhs.coeffs.len(), "dimension mismatch");
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a += b.clone();
        }
    }
}

impl<S: Scalar> SubAssign<&AlgebraElement<S>> for AlgebraElement<S> {
    fn sub_assign(&mut self, rhs: &AlgebraElement<S>) {
        assert_eq!(self.coeffs.len(), rhs.coeffs.len(), "dimension mismatch");
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a -= b.clone();
        }
    }
}

impl<S: Scalar> Neg for AlgebraElement<S> {
    type Output = Self;

    fn neg(self) -> Self {
        AlgebraElement { coeffs: self.coeffs.into_iter().map(|c| -c).collect() }
    }
}

impl<S: Scalar> Mul<S> for AlgebraElement<S> {
    type Output = Self;

    fn mul(self, s: S) -> Self {
        self.scale(&s)
    }
}
