//! Chevalley basis of a simple complex Lie algebra.
//!
//! Basis order: `H_{alpha_1}, ..., H_{alpha_N}` followed by `R_alpha` for the
//! roots in `RootSystem::roots()` order.  Brackets are
//! `[R_a, R_b] = N_{a,b} R_{a+b}`, `[R_a, R_{-a}] = H_a`, `[H, R_a] = a(H) R_a`,
//! with all structure constants integers.

mod constants;

use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::element::{AlgebraElement, Scalar};
use crate::error::{Error, Result};
use crate::rootsystem::{Root, RootSystem};

/// Root-level lookup tables shared by the constant solver.
pub(crate) struct RootData<'a> {
    rs: &'a RootSystem,
    sums: Vec<Option<usize>>,
    len2: Vec<i64>,
}

impl<'a> RootData<'a> {
    fn new(rs: &'a RootSystem) -> Self {
        let roots = rs.roots();
        let nr = roots.len();
        let mut sums = vec![None; nr * nr];
        for a in 0..nr {
            for b in 0..nr {
                let v: Vec<i32> = roots[a].coeffs.iter().zip(&roots[b].coeffs).map(|(x, y)| x + y).collect();
                sums[a * nr + b] = rs.root_index(&v);
            }
        }
        let len2 = roots.iter().map(|r| rs.inner(&r.coeffs, &r.coeffs)).collect();
        RootData { rs, sums, len2 }
    }

    fn sum(&self, a: usize, b: usize) -> Option<usize> {
        self.sums[a * self.rs.roots().len() + b]
    }

    fn neg(&self, a: usize) -> usize {
        self.rs.neg_index(a)
    }
}

/// Sparse bracket of two basis vectors: list of `(basis index, coefficient)`.
type BracketEntry = Vec<(usize, i64)>;

#[derive(Debug, Clone)]
pub struct ChevalleyAlgebra {
    pub rs: RootSystem,
    dim: usize,
    nroots: usize,
    constants: Vec<i64>,
    sums: Vec<Option<usize>>,
    strings: Vec<i64>,
    coroots: Vec<Vec<i64>>,
    /// `root_values[a][i] = alpha_a(H_i)`.
    root_values: Vec<Vec<i64>>,
    table: Vec<BracketEntry>,
    /// Killing form on the Cartan block.
    killing_cartan: Vec<Vec<i64>>,
    /// `kappa(R_a, R_{-a})` per root.
    killing_root: Vec<i64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum JacobiMode {
    Exhaustive,
    Sampled { triples: usize, seed: u64 },
}

#[derive(Debug, Clone, Serialize)]
pub struct JacobiReport {
    pub mode: String,
    pub triples_checked: usize,
    pub violations: Vec<(usize, usize, usize)>,
}

impl JacobiReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ConstantsReport {
    pub pairs_checked: usize,
    pub negation_violations: Vec<(usize, usize)>,
    pub string_violations: Vec<(usize, usize)>,
}

impl ConstantsReport {
    pub fn passed(&self) -> bool {
        self.negation_violations.is_empty() && self.string_violations.is_empty()
    }
}

impl ChevalleyAlgebra {
    pub fn new(rs: RootSystem) -> Result<Self> {
        let data = RootData::new(&rs);
        let constants = constants::structure_constants(&data)?;
        let nroots = rs.roots().len();
        let mut strings = vec![0i64; nroots * nroots];
        for a in 0..nroots {
            for b in 0..nroots {
                strings[a * nroots + b] = constants::string_length(&data, a, b);
            }
        }
        let sums = data.sums;
        let coroots = rs.roots().iter().map(|r| rs.coroot_int(&r.coeffs)).collect();
        let root_values = rs
            .roots()
            .iter()
            .map(|r| (0..rs.rank).map(|i| rs.eval_on_coroot(&r.coeffs, i)).collect())
            .collect();
        let mut alg = ChevalleyAlgebra {
            dim: rs.rank + nroots,
            rs,
            nroots,
            constants,
            sums,
            strings,
            coroots,
            root_values,
            table: Vec::new(),
            killing_cartan: Vec::new(),
            killing_root: Vec::new(),
        };
        alg.table = alg.build_table();
        alg.killing_cartan = (0..alg.rank()).map(|i| (0..alg.rank()).map(|j| alg.trace_form_basis(i, j)).collect()).collect();
        alg.killing_root = (0..nroots).map(|a| alg.trace_form_basis(alg.root_basis(a), alg.root_basis(alg.rs.neg_index(a)))).collect();
        Ok(alg)
    }

    pub fn from_type(series: crate::rootsystem::Series, rank: usize) -> Result<Self> {
        Self::new(RootSystem::new(series, rank)?)
    }

    fn build_table(&self) -> Vec<BracketEntry> {
        let (n, dim) = (self.rank(), self.dim);
        let mut table = vec![Vec::new(); dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                let entry = match (self.root_of(i), self.root_of(j)) {
                    (None, None) => Vec::new(),
                    (None, Some(b)) => vec![(j, self.root_values[b][i])],
                    (Some(a), None) => vec![(i, -self.root_values[a][j])],
                    (Some(a), Some(b)) => {
                        if b == self.rs.neg_index(a) {
                            self.coroots[a].iter().enumerate().filter(|(_, &c)| c != 0).map(|(k, &c)| (k, c)).collect()
                        } else if let Some(s) = self.sums[a * self.nroots + b] {
                            vec![(n + s, self.constants[a * self.nroots + b])]
                        } else {
                            Vec::new()
                        }
                    }
                };
                table[i * dim + j] = entry.into_iter().filter(|&(_, c)| c != 0).collect();
            }
        }
        table
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rs.rank
    }

    pub fn num_roots(&self) -> usize {
        self.nroots
    }

    /// Basis index of `R_alpha` for root index `a`.
    pub fn root_basis(&self, a: usize) -> usize {
        self.rank() + a
    }

    /// Root index of basis vector `i`, or `None` for Cartan basis vectors.
    pub fn root_of(&self, i: usize) -> Option<usize> {
        i.checked_sub(self.rank())
    }

    pub fn root(&self, a: usize) -> &Root {
        &self.rs.roots()[a]
    }

    /// Height of the weight of basis vector `i` (zero on the Cartan subalgebra).
    pub fn basis_height(&self, i: usize) -> i32 {
        self.root_of(i).map_or(0, |a| self.rs.roots()[a].height)
    }

    /// `N_{alpha,beta}` for root indices, zero if `alpha + beta` is not a root.
    pub fn structure_constant(&self, a: usize, b: usize) -> i64 {
        self.constants[a * self.nroots + b]
    }

    /// Index of `alpha + beta` if it is a root.
    pub fn root_sum(&self, a: usize, b: usize) -> Option<usize> {
        self.sums[a * self.nroots + b]
    }

    /// `max { n : beta - n alpha is a root }`.
    pub fn string_p(&self, a: usize, b: usize) -> i64 {
        self.strings[a * self.nroots + b]
    }

    /// Integer coordinates of `H_alpha` in the simple coroot basis.
    pub fn coroot(&self, a: usize) -> &[i64] {
        &self.coroots[a]
    }

    /// `alpha_a(H_i)`.
    pub fn root_value(&self, a: usize, i: usize) -> i64 {
        self.root_values[a][i]
    }

    /// Bracket of basis vectors as a sparse list.
    pub fn basis_bracket(&self, i: usize, j: usize) -> &[(usize, i64)] {
        &self.table[i * self.dim + j]
    }

    pub fn basis_element<S: Scalar>(&self, i: usize) -> AlgebraElement<S> {
        AlgebraElement::basis(self.dim, i)
    }

    pub fn zero<S: Scalar>(&self) -> AlgebraElement<S> {
        AlgebraElement::zero(self.dim)
    }

    /// Lie bracket; panics on dimension mismatch (see [`Self::try_bracket`]).
    pub fn bracket<S: Scalar>(&self, a: &AlgebraElement<S>, b: &AlgebraElement<S>) -> AlgebraElement<S> {
        assert_eq!(a.dim(), self.dim, "dimension mismatch");
        assert_eq!(b.dim(), self.dim, "dimension mismatch");
        let mut out = vec![S::zero(); self.dim];
        let nz_b: Vec<usize> = (0..self.dim).filter(|&j| !b.coeffs[j].is_zero()).collect();
        for (i, ai) in a.coeffs.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            for &j in &nz_b {
                let ab = ai.clone() * b.coeffs[j].clone();
                for &(k, c) in &self.table[i * self.dim + j] {
                    out[k] += ab.clone() * S::from_int(c);
                }
            }
        }
        AlgebraElement::from_coeffs(out)
    }

    pub fn try_bracket<S: Scalar>(&self, a: &AlgebraElement<S>, b: &AlgebraElement<S>) -> Result<AlgebraElement<S>> {
        for x in [a, b] {
            if x.dim() != self.dim {
                return Err(Error::DimensionMismatch { expected: self.dim, got: x.dim() });
            }
        }
        Ok(self.bracket(a, b))
    }

    /// `trace(ad e_i ad e_j)` computed directly from the bracket table.
    fn trace_form_basis(&self, i: usize, j: usize) -> i64 {
        let mut tr = 0;
        for c in 0..self.dim {
            for &(k, x) in &self.table[j * self.dim + c] {
                for &(l, y) in &self.table[i * self.dim + k] {
                    if l == c {
                        tr += x * y;
                    }
                }
            }
        }
        tr
    }

    /// Killing form of two basis vectors.
    pub fn killing_basis(&self, i: usize, j: usize) -> i64 {
        match (self.root_of(i), self.root_of(j)) {
            (None, None) => self.killing_cartan[i][j],
            (Some(a), Some(b)) if b == self.rs.neg_index(a) => self.killing_root[a],
            _ => 0,
        }
    }

    /// `kappa(a, b) = trace(ad a ad b)`.
    pub fn killing_form<S: Scalar>(&self, a: &AlgebraElement<S>, b: &AlgebraElement<S>) -> S {
        let n = self.rank();
        let mut s = S::zero();
        for i in 0..n {
            for j in 0..n {
                s += a.coeffs[i].clone() * b.coeffs[j].clone() * S::from_int(self.killing_cartan[i][j]);
            }
        }
        for r in 0..self.nroots {
            let i = n + r;
            let j = n + self.rs.neg_index(r);
            s += a.coeffs[i].clone() * b.coeffs[j].clone() * S::from_int(self.killing_root[r]);
        }
        s
    }

    /// Matrix of `ad a` in the Chevalley basis (column `j` is `[a, e_j]`).
    pub fn adjoint_matrix<S: Scalar>(&self, a: &AlgebraElement<S>) -> DMatrix<S> {
        let mut m = DMatrix::from_element(self.dim, self.dim, S::zero());
        for (i, ai) in a.coeffs.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            for j in 0..self.dim {
                for &(k, c) in &self.table[i * self.dim + j] {
                    m[(k, j)] += ai.clone() * S::from_int(c);
                }
            }
        }
        m
    }

    fn jacobi_holds(&self, a: usize, b: usize, c: usize) -> bool {
        let mut acc = vec![0i64; self.dim];
        for (x, y, z) in [(a, b, c), (b, c, a), (c, a, b)] {
            for &(k, u) in &self.table[y * self.dim + z] {
                for &(l, v) in &self.table[x * self.dim + k] {
                    acc[l] += u * v;
                }
            }
        }
        acc.iter().all(|&v| v == 0)
    }

    pub fn verify_jacobi(&self, mode: JacobiMode) -> JacobiReport {
        let mut violations = Vec::new();
        let mut checked = 0;
        match mode {
            JacobiMode::Exhaustive => {
                for a in 0..self.dim {
                    for b in a..self.dim {
                        for c in b..self.dim {
                            checked += 1;
                            if !self.jacobi_holds(a, b, c) {
                                violations.push((a, b, c));
                            }
                        }
                    }
                }
            }
            JacobiMode::Sampled { triples, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                for _ in 0..triples {
                    let (a, b, c) = (rng.gen_range(0..self.dim), rng.gen_range(0..self.dim), rng.gen_range(0..self.dim));
                    checked += 1;
                    if !self.jacobi_holds(a, b, c) {
                        violations.push((a, b, c));
                    }
                }
            }
        }
        JacobiReport { mode: format!("{mode:?}"), triples_checked: checked, violations }
    }

    /// Exhaustive for `dim <= 60`, otherwise `10^4` seeded random triples.
    pub fn default_jacobi_mode(&self) -> JacobiMode {
        if self.dim <= 60 {
            JacobiMode::Exhaustive
        } else {
            JacobiMode::Sampled { triples: 10_000, seed: 0x5eed }
        }
    }

    /// Checks `N_{-a,-b} = -N_{a,b}` and `|N_{a,b}| = p + 1` over all root pairs with `a + b` a root.
    pub fn verify_constants(&self) -> ConstantsReport {
        let mut report = ConstantsReport { pairs_checked: 0, negation_violations: Vec::new(), string_violations: Vec::new() };
        for a in 0..self.nroots {
            for b in 0..self.nroots {
                if self.root_sum(a, b).is_none() {
                    continue;
                }
                report.pairs_checked += 1;
                let n = self.structure_constant(a, b);
                if self.structure_constant(self.rs.neg_index(a), self.rs.neg_index(b)) != -n {
                    report.negation_violations.push((a, b));
                }
                if n.abs() != self.string_p(a, b) + 1 {
                    report.string_violations.push((a, b));
                }
            }
        }
        report
    }

    /// Rows `(alpha, beta, N_{alpha,beta})` for every pair with `alpha + beta` a root.
    pub fn constant_rows(&self) -> Vec<(Root, Root, i64)> {
        let mut rows = Vec::new();
        for a in 0..self.nroots {
            for b in 0..self.nroots {
                if self.root_sum(a, b).is_some() {
                    rows.push((self.root(a).clone(), self.root(b).clone(), self.structure_constant(a, b)));
                }
            }
        }
        rows
    }
}
