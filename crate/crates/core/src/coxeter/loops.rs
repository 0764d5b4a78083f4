use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{grade_component, grading_defect, CoxeterAutomorphism};
use crate::chevalley::ChevalleyAlgebra;
use crate::element::{AlgebraElement, FloatElement};
use crate::error::{Error, Result};
use crate::involution::AntilinearConjugation;

/// Laurent polynomial `sum_{|j| <= d} lambda^j xi_j` with coefficients in `g^C`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoopElement {
    d: usize,
    coeffs: Vec<FloatElement>,
}

impl LoopElement {
    pub fn zero(d: usize, dim: usize) -> Self {
        LoopElement { d, coeffs: vec![AlgebraElement::zero(dim); 2 * d + 1] }
    }

    pub fn from_coeffs(d: usize, coeffs: Vec<FloatElement>) -> Result<Self> {
        if coeffs.len() != 2 * d + 1 {
            return Err(Error::DimensionMismatch { expected: 2 * d + 1, got: coeffs.len() });
        }
        Ok(LoopElement { d, coeffs })
    }

    /// Coefficients stored contiguously, degree `-d` first.
    pub fn from_flat(d: usize, dim: usize, flat: &[Complex64]) -> Result<Self> {
        if flat.len() != (2 * d + 1) * dim {
            return Err(Error::DimensionMismatch { expected: (2 * d + 1) * dim, got: flat.len() });
        }
        Ok(LoopElement { d, coeffs: flat.chunks(dim).map(|c| AlgebraElement::from_coeffs(c.to_vec())).collect() })
    }

    pub fn to_flat(&self) -> Vec<Complex64> {
        self.coeffs.iter().flat_map(|c| c.coeffs.iter().copied()).collect()
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn dim(&self) -> usize {
        self.coeffs[0].dim()
    }

    pub fn degrees(&self) -> std::ops::RangeInclusive<i64> {
        -(self.d as i64)..=self.d as i64
    }

    /// `xi_j`; zero outside `|j| <= d` is not representable, so this panics there.
    pub fn coeff(&self, j: i64) -> &FloatElement {
        &self.coeffs[(j + self.d as i64) as usize]
    }

    pub fn coeff_mut(&mut self, j: i64) -> &mut FloatElement {
        &mut self.coeffs[(j + self.d as i64) as usize]
    }

    pub fn get(&self, j: i64) -> Option<&FloatElement> {
        if j.unsigned_abs() as usize <= self.d {
            Some(self.coeff(j))
        } else {
            None
        }
    }

    pub fn set(&mut self, j: i64, x: FloatElement) {
        *self.coeff_mut(j) = x;
    }

    pub fn scale(&self, s: Complex64) -> Self {
        LoopElement { d: self.d, coeffs: self.coeffs.iter().map(|c| c.scale(&s)).collect() }
    }

    pub fn add_scaled(&mut self, other: &LoopElement, s: Complex64) {
        assert_eq!(self.d, other.d, "degree mismatch");
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            a.add_scaled(b, &s);
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(AlgebraElement::max_abs).fold(0.0, f64::max)
    }

    pub fn distance(&self, other: &LoopElement) -> f64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .flat_map(|(a, b)| a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| (x - y).norm()))
            .fold(0.0, f64::max)
    }

    /// `sum_j lambda^j xi_j`.
    pub fn evaluate(&self, lambda: Complex64) -> FloatElement {
        let mut out = AlgebraElement::zero(self.dim());
        for j in self.degrees() {
            out.add_scaled(self.coeff(j), &lambda.powi(j as i32));
        }
        out
    }

    /// Largest coefficient of any `xi_j` outside `g_{j mod k}`.
    pub fn grading_defect(&self, sigma: &CoxeterAutomorphism) -> f64 {
        self.degrees().map(|j| grading_defect(sigma, self.coeff(j), j)).fold(0.0, f64::max)
    }

    /// Projects each `xi_j` onto `g_{j mod k}`.
    pub fn project_grading(&self, sigma: &CoxeterAutomorphism) -> LoopElement {
        LoopElement { d: self.d, coeffs: self.degrees().map(|j| grade_component(sigma, self.coeff(j), j)).collect() }
    }

    /// The element with coefficients `conj(xi_{-j})`.
    pub fn conj_dual(&self, conj: &AntilinearConjugation) -> LoopElement {
        LoopElement { d: self.d, coeffs: self.degrees().map(|j| conj.apply(self.coeff(-j))).collect() }
    }

    /// `max_j |xi_j - conj(xi_{-j})|`.
    pub fn reality_defect(&self, conj: &AntilinearConjugation) -> f64 {
        self.distance(&self.conj_dual(conj))
    }

    /// Coefficient-wise convolution of brackets; the result has degree bound `d_a + d_b`.
    pub fn bracket(alg: &ChevalleyAlgebra, a: &LoopElement, b: &LoopElement) -> LoopElement {
        let d = a.d + b.d;
        let mut out = LoopElement::zero(d, a.dim());
        for i in a.degrees() {
            if a.coeff(i).max_abs() == 0.0 {
                continue;
            }
            for j in b.degrees() {
                if b.coeff(j).max_abs() == 0.0 {
                    continue;
                }
                let br = alg.bracket(a.coeff(i), b.coeff(j));
                *out.coeff_mut(i + j) += &br;
            }
        }
        out
    }

    /// Drops coefficients with `|j| > d`, returning the largest dropped coefficient.
    pub fn truncate(&self, d: usize) -> (LoopElement, f64) {
        let mut out = LoopElement::zero(d, self.dim());
        let mut dropped: f64 = 0.0;
        for j in self.degrees() {
            if j.unsigned_abs() as usize <= d {
                out.set(j, self.coeff(j).clone());
            } else {
                dropped = dropped.max(self.coeff(j).max_abs());
            }
        }
        (out, dropped)
    }

    /// Re-embeds with a larger degree bound.
    pub fn widen(&self, d: usize) -> LoopElement {
        assert!(d >= self.d);
        let mut out = LoopElement::zero(d, self.dim());
        for j in self.degrees() {
            out.set(j, self.coeff(j).clone());
        }
        out
    }
}
