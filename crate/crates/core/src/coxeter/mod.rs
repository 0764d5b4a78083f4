//! Coxeter automorphism, the induced `Z_k` grading and twisted loop elements.

mod loops;

pub use loops::LoopElement;

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::chevalley::ChevalleyAlgebra;
use crate::element::{AlgebraElement, FloatElement, Scalar};
use crate::error::{Error, Result};
use crate::rootsystem::CartanVector;

/// `sigma(R_alpha) = eps^{h(alpha)} R_alpha` with `eps = exp(2 pi i / k)`, identity on the Cartan subalgebra.
#[derive(Debug, Clone)]
pub struct CoxeterAutomorphism {
    pub k: usize,
    /// Grade `h(e_i) mod k` of every basis vector.
    grades: Vec<usize>,
}

impl CoxeterAutomorphism {
    pub fn new(alg: &ChevalleyAlgebra) -> Self {
        let k = alg.rs.coxeter_number;
        let grades = (0..alg.dim()).map(|i| alg.basis_height(i).rem_euclid(k as i32) as usize).collect();
        CoxeterAutomorphism { k, grades }
    }

    pub fn grade(&self, i: usize) -> usize {
        self.grades[i]
    }

    pub fn grades(&self) -> &[usize] {
        &self.grades
    }

    /// `exp(2 pi i j / k)`.
    pub fn root_of_unity(&self, j: i64) -> Complex64 {
        Complex64::from_polar(1.0, 2.0 * PI * (j.rem_euclid(self.k as i64) as f64) / self.k as f64)
    }

    pub fn eigenvalue(&self, i: usize) -> Complex64 {
        self.root_of_unity(self.grades[i] as i64)
    }

    pub fn apply(&self, x: &FloatElement) -> FloatElement {
        self.apply_power(x, 1)
    }

    pub fn apply_power(&self, x: &FloatElement, l: i64) -> FloatElement {
        AlgebraElement::from_coeffs(
            x.coeffs.iter().enumerate().map(|(i, c)| c * self.root_of_unity(self.grades[i] as i64 * l)).collect(),
        )
    }

    /// `sigma^k = id` holds exactly because every grade is an integer mod k.
    pub fn order_divides_k(&self) -> bool {
        self.grades.iter().all(|&g| (g * self.k).is_multiple_of(self.k))
    }

    /// `sigma` is a bracket automorphism iff every basis bracket respects grades additively.
    pub fn is_automorphism(&self, alg: &ChevalleyAlgebra) -> bool {
        (0..alg.dim()).all(|i| {
            (0..alg.dim()).all(|j| {
                alg.basis_bracket(i, j).iter().all(|&(l, _)| self.grades[l] == (self.grades[i] + self.grades[j]) % self.k)
            })
        })
    }

    /// Basis indices spanning `g_j`.
    pub fn graded_basis(&self, j: i64) -> Vec<usize> {
        let j = j.rem_euclid(self.k as i64) as usize;
        (0..self.grades.len()).filter(|&i| self.grades[i] == j).collect()
    }

    /// `dim g_j` for `j = 0..k`.
    pub fn grading_dimensions(&self) -> Vec<usize> {
        let mut dims = vec![0; self.k];
        for &g in &self.grades {
            dims[g] += 1;
        }
        dims
    }
}

/// Components `pi_j(x)` for `j = 0..k`, by support.
pub fn grade_decompose<S: Scalar>(sigma: &CoxeterAutomorphism, x: &AlgebraElement<S>) -> Vec<AlgebraElement<S>> {
    let mut parts = vec![AlgebraElement::zero(x.dim()); sigma.k];
    for (i, c) in x.coeffs.iter().enumerate() {
        parts[sigma.grade(i)].coeffs[i] = c.clone();
    }
    parts
}

/// Component of `x` in `g_j`.
pub fn grade_component<S: Scalar>(sigma: &CoxeterAutomorphism, x: &AlgebraElement<S>, j: i64) -> AlgebraElement<S> {
    let j = j.rem_euclid(sigma.k as i64) as usize;
    AlgebraElement::from_coeffs(
        x.coeffs.iter().enumerate().map(|(i, c)| if sigma.grade(i) == j { c.clone() } else { S::zero() }).collect(),
    )
}

/// Largest coefficient of `x` outside `g_j`.
pub fn grading_defect(sigma: &CoxeterAutomorphism, x: &FloatElement, j: i64) -> f64 {
    let j = j.rem_euclid(sigma.k as i64) as usize;
    x.coeffs.iter().enumerate().filter(|(i, _)| sigma.grade(*i) != j).map(|(_, c)| c.norm()).fold(0.0, f64::max)
}

/// Eigenspace projectors `pi_j = (1/k) sum_l eps^{-jl} sigma^l`.
#[derive(Debug, Clone)]
pub struct GradingProjector {
    sigma: CoxeterAutomorphism,
}

impl GradingProjector {
    pub fn new(sigma: CoxeterAutomorphism) -> Self {
        GradingProjector { sigma }
    }

    pub fn k(&self) -> usize {
        self.sigma.k
    }

    pub fn project(&self, x: &FloatElement, j: i64) -> FloatElement {
        let k = self.sigma.k as i64;
        let mut out = AlgebraElement::zero(x.dim());
        for l in 0..k {
            let w = self.sigma.root_of_unity(-j * l) / k as f64;
            out.add_scaled(&self.sigma.apply_power(x, l), &w);
        }
        out
    }
}

pub const DEFAULT_CYCLIC_TOLERANCE: f64 = 1e-12;

/// Whether `x` in `g_1` has a nonzero component in every simple and lowest root space.
/// Components are compared with `tol` times the largest coefficient.
pub fn is_cyclic(alg: &ChevalleyAlgebra, sigma: &CoxeterAutomorphism, x: &FloatElement, tol: f64) -> Result<bool> {
    let scale = x.max_abs();
    if grading_defect(sigma, x, 1) > tol * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::domain("element is not in g_1"));
    }
    if scale == 0.0 {
        return Ok(false);
    }
    Ok(extended_simple_basis(alg).iter().all(|&i| x.coeffs[i].norm() > tol * scale))
}

/// Basis indices of `R_{alpha_0}, R_{alpha_1}, ..., R_{alpha_N}`.
pub fn extended_simple_basis(alg: &ChevalleyAlgebra) -> Vec<usize> {
    alg.rs
        .extended_simple_roots()
        .iter()
        .map(|r| alg.root_basis(alg.rs.root_index(&r.coeffs).expect("extended simple roots are roots")))
        .collect()
}

/// `Ad_{exp S} x`: multiplies the `R_alpha` component by `exp(alpha(S))`.
pub fn ad_exp_cartan(alg: &ChevalleyAlgebra, s: &CartanVector<Complex64>, x: &FloatElement) -> FloatElement {
    let n = alg.rank();
    let mut out = x.clone();
    for a in 0..alg.num_roots() {
        let i = n + a;
        if x.coeffs[i] == Complex64::new(0.0, 0.0) {
            continue;
        }
        let alpha_s: Complex64 = (0..n).map(|l| s.0[l] * alg.root_value(a, l) as f64).sum();
        out.coeffs[i] = x.coeffs[i] * alpha_s.exp();
    }
    out
}
