use nalgebra::DMatrix;
use num_rational::Rational64;

use crate::chevalley::ChevalleyAlgebra;
use crate::element::{AlgebraElement, Scalar};

/// Linear map of `g^C` sending each root vector to a multiple of a root vector and
/// the Cartan subalgebra to itself, with integer entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonomialMap {
    /// Column `i` holds the coordinates of the image of `H_i`.
    pub cartan: Vec<Vec<i64>>,
    /// `R_a -> coeff * R_b` stored as `(b, coeff)`.
    pub roots: Vec<(usize, i64)>,
}

impl MonomialMap {
    pub fn identity(alg: &ChevalleyAlgebra) -> Self {
        let n = alg.rank();
        MonomialMap {
            cartan: (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect(),
            roots: (0..alg.num_roots()).map(|a| (a, 1)).collect(),
        }
    }

    /// Image of basis vector `i` as a sparse list.
    pub fn image(&self, alg: &ChevalleyAlgebra, i: usize) -> Vec<(usize, i64)> {
        match alg.root_of(i) {
            None => self.cartan[i].iter().enumerate().filter(|(_, &c)| c != 0).map(|(j, &c)| (j, c)).collect(),
            Some(a) => {
                let (b, c) = self.roots[a];
                vec![(alg.root_basis(b), c)]
            }
        }
    }

    pub fn apply<S: Scalar>(&self, alg: &ChevalleyAlgebra, x: &AlgebraElement<S>) -> AlgebraElement<S> {
        let mut out = AlgebraElement::zero(x.dim());
        for (i, c) in x.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (j, v) in self.image(alg, i) {
                out.coeffs[j] += c.clone() * S::from_int(v);
            }
        }
        out
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &MonomialMap) -> MonomialMap {
        let n = self.cartan.len();
        let cartan = (0..n)
            .map(|i| (0..n).map(|j| (0..n).map(|l| self.cartan[l][j] * other.cartan[i][l]).sum()).collect())
            .collect();
        let roots = other
            .roots
            .iter()
            .map(|&(b, c)| {
                let (d, e) = self.roots[b];
                (d, c * e)
            })
            .collect();
        MonomialMap { cartan, roots }
    }

    pub fn matrix(&self, alg: &ChevalleyAlgebra) -> DMatrix<i64> {
        let mut m = DMatrix::zeros(alg.dim(), alg.dim());
        for i in 0..alg.dim() {
            for (j, c) in self.image(alg, i) {
                m[(j, i)] = c;
            }
        }
        m
    }

    pub fn is_identity(&self, alg: &ChevalleyAlgebra) -> bool {
        *self == MonomialMap::identity(alg)
    }

    /// Exact check of `M[e_i, e_j] = [M e_i, M e_j]` on all basis pairs.
    pub fn is_automorphism(&self, alg: &ChevalleyAlgebra) -> bool {
        let dim = alg.dim();
        let images: Vec<AlgebraElement<Rational64>> = (0..dim)
            .map(|i| self.apply(alg, &alg.basis_element::<Rational64>(i)))
            .collect();
        for i in 0..dim {
            for j in i + 1..dim {
                let mut lhs: AlgebraElement<Rational64> = alg.zero();
                for &(k, c) in alg.basis_bracket(i, j) {
                    lhs.add_scaled(&images[k], &Rational64::from_integer(c));
                }
                if lhs != alg.bracket(&images[i], &images[j]) {
                    return false;
                }
            }
        }
        true
    }
}
