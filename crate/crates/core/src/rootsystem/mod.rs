//! Root systems of the simple complex Lie algebras.
//!
//! Roots are integer coefficient vectors in the basis of simple roots.  All
//! Cartan-level quantities (pairings, the Killing form on the Cartan
//! subalgebra, Killing duals, dual bases) are exact.  Simple roots follow
//! Bourbaki numbering, except for `G2` where `alpha_1` is the long root so
//! that the lowest root attaches to `alpha_1` in the extended diagram.

mod diagram;

pub use diagram::{diagram_automorphisms, involutions, Edge, ExtendedDiagram, NodePermutation};

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{self, q, Q};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Series {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

impl Series {
    pub fn letter(self) -> char {
        match self {
            Series::A => 'A',
            Series::B => 'B',
            Series::C => 'C',
            Series::D => 'D',
            Series::E => 'E',
            Series::F => 'F',
            Series::G => 'G',
        }
    }

    pub fn from_letter(c: char) -> Result<Self> {
        Ok(match c.to_ascii_uppercase() {
            'A' => Series::A,
            'B' => Series::B,
            'C' => Series::C,
            'D' => Series::D,
            'E' => Series::E,
            'F' => Series::F,
            'G' => Series::G,
            other => return Err(Error::domain(format!("unknown series '{other}'"))),
        })
    }

    pub fn is_valid_rank(self, rank: usize) -> bool {
        match self {
            Series::A => rank >= 1,
            Series::B => rank >= 2,
            Series::C => rank >= 3,
            Series::D => rank >= 4,
            Series::E => (6..=8).contains(&rank),
            Series::F => rank == 4,
            Series::G => rank == 2,
        }
    }
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

impl FromStr for Series {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut chars = s.trim().chars();
        match (chars.next(), chars.next()) {
            (Some(c), None) => Series::from_letter(c),
            _ => Err(Error::domain(format!("unknown series '{s}'"))),
        }
    }
}

/// Every valid simple type of rank at most `max_rank`.
pub fn all_types(max_rank: usize) -> Vec<(Series, usize)> {
    let mut out = Vec::new();
    for series in [Series::A, Series::B, Series::C, Series::D, Series::E, Series::F, Series::G] {
        for rank in 1..=max_rank {
            if series.is_valid_rank(rank) {
                out.push((series, rank));
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Root {
    pub coeffs: Vec<i32>,
    pub height: i32,
}

impl Root {
    pub fn new(coeffs: Vec<i32>) -> Self {
        let height = coeffs.iter().sum();
        Root { coeffs, height }
    }

    pub fn is_positive(&self) -> bool {
        self.height > 0
    }

    pub fn negated(&self) -> Root {
        Root::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl fmt::Display for Root {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let sign = if c < 0 { "-" } else if first { "" } else { "+" };
            let mag = c.abs();
            if mag == 1 {
                write!(f, "{sign}a{}", i + 1)?;
            } else {
                write!(f, "{sign}{mag}a{}", i + 1)?;
            }
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Coefficients of an element of the Cartan subalgebra in the basis
/// `H_{alpha_1}, ..., H_{alpha_N}` of simple coroots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CartanVector<S>(pub Vec<S>);

impl<S> CartanVector<S> {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl CartanVector<Q> {
    pub fn to_complex(&self) -> CartanVector<num_complex::Complex64> {
        CartanVector(self.0.iter().map(|x| num_complex::Complex64::new(exact::to_f64(x), 0.0)).collect())
    }
}

#[derive(Debug, Clone)]
pub struct RootSystem {
    pub series: Series,
    pub rank: usize,
    /// `cartan_matrix[i][j] = alpha_j(H_{alpha_i}) = 2 (alpha_i, alpha_j) / (alpha_i, alpha_i)`.
    pub cartan_matrix: Vec<Vec<i64>>,
    /// Integer-normalized invariant inner product of the simple roots.
    gram: Vec<Vec<i64>>,
    /// Positive roots (by height, then by descending coefficient vector) followed by their negatives.
    /// The first `rank` roots are the simple roots in order.
    roots: Vec<Root>,
    index: HashMap<Vec<i32>, usize>,
    pub lowest_root: Root,
    pub marks: Vec<i64>,
    pub coxeter_number: usize,
    killing_t: Vec<Vec<Q>>,
    killing_t_inv: Vec<Vec<Q>>,
}

fn simple_gram(series: Series, n: usize) -> Vec<Vec<i64>> {
    let mut g = vec![vec![0i64; n]; n];
    let link = |g: &mut Vec<Vec<i64>>, i: usize, j: usize, v: i64| {
        g[i][j] = v;
        g[j][i] = v;
    };
    match series {
        Series::A => {
            for i in 0..n {
                g[i][i] = 2;
            }
            for i in 1..n {
                link(&mut g, i - 1, i, -1);
            }
        }
        Series::B => {
            for i in 0..n {
                g[i][i] = if i + 1 == n { 2 } else { 4 };
            }
            for i in 1..n {
                link(&mut g, i - 1, i, -2);
            }
        }
        Series::C => {
            for i in 0..n {
                g[i][i] = if i + 1 == n { 4 } else { 2 };
            }
            for i in 1..n {
                link(&mut g, i - 1, i, if i + 1 == n { -2 } else { -1 });
            }
        }
        Series::D => {
            for i in 0..n {
                g[i][i] = 2;
            }
            for i in 1..n - 1 {
                link(&mut g, i - 1, i, -1);
            }
            link(&mut g, n - 3, n - 1, -1);
        }
        Series::E => {
            for i in 0..n {
                g[i][i] = 2;
            }
            // Bourbaki: 1-3-4-5-6-7-8 with 2 attached to 4.
            link(&mut g, 0, 2, -1);
            link(&mut g, 1, 3, -1);
            for i in 3..n {
                link(&mut g, i - 1, i, -1);
            }
        }
        Series::F => {
            g[0][0] = 4;
            g[1][1] = 4;
            g[2][2] = 2;
            g[3][3] = 2;
            link(&mut g, 0, 1, -2);
            link(&mut g, 1, 2, -2);
            link(&mut g, 2, 3, -1);
        }
        Series::G => {
            g[0][0] = 6;
            g[1][1] = 2;
            link(&mut g, 0, 1, -3);
        }
    }
    g
}

/// Positive roots by closure under addition of simple roots, using root strings:
/// `beta + alpha_i` is a root iff `p - <beta, alpha_i^vee> > 0` where `p` is the
/// length of the string below `beta`.
pub fn positive_roots_by_closure(cartan: &[Vec<i64>]) -> Vec<Vec<i32>> {
    let n = cartan.len();
    let unit = |i: usize| {
        let mut v = vec![0i32; n];
        v[i] = 1;
        v
    };
    let mut all: BTreeSet<Vec<i32>> = (0..n).map(unit).collect();
    let mut level: Vec<Vec<i32>> = (0..n).map(unit).collect();
    while !level.is_empty() {
        let mut next = BTreeSet::new();
        for beta in &level {
            for i in 0..n {
                let pairing: i64 = (0..n).map(|j| beta[j] as i64 * cartan[i][j]).sum();
                let mut p = 0i64;
                let mut lower = beta.clone();
                loop {
                    lower[i] -= 1;
                    if all.contains(&lower) {
                        p += 1;
                    } else {
                        break;
                    }
                }
                if p - pairing > 0 {
                    let mut up = beta.clone();
                    up[i] += 1;
                    next.insert(up);
                }
            }
        }
        all.extend(next.iter().cloned());
        level = next.into_iter().collect();
    }
    all.into_iter().collect()
}

/// All roots as the orbit of the simple roots under the simple reflections.
pub fn roots_by_weyl_orbit(cartan: &[Vec<i64>]) -> BTreeSet<Vec<i32>> {
    let n = cartan.len();
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::new();
    for i in 0..n {
        let mut v = vec![0i32; n];
        v[i] = 1;
        seen.insert(v.clone());
        queue.push_back(v);
    }
    while let Some(beta) = queue.pop_front() {
        for i in 0..n {
            let pairing: i64 = (0..n).map(|j| beta[j] as i64 * cartan[i][j]).sum();
            if pairing == 0 {
                continue;
            }
            let mut img = beta.clone();
            img[i] -= pairing as i32;
            if seen.insert(img.clone()) {
                queue.push_back(img);
            }
        }
    }
    seen
}

impl RootSystem {
    pub fn new(series: Series, rank: usize) -> Result<Self> {
        if !series.is_valid_rank(rank) {
            return Err(Error::domain(format!("{series}{rank} is not a simple type")));
        }
        let gram = simple_gram(series, rank);
        let cartan_matrix: Vec<Vec<i64>> = (0..rank)
            .map(|i| (0..rank).map(|j| 2 * gram[i][j] / gram[i][i]).collect())
            .collect();

        let mut positive: Vec<Root> = positive_roots_by_closure(&cartan_matrix).into_iter().map(Root::new).collect();
        positive.sort_by(|a, b| a.height.cmp(&b.height).then_with(|| b.coeffs.cmp(&a.coeffs)));
        let negative: Vec<Root> = positive.iter().map(Root::negated).collect();
        let roots: Vec<Root> = positive.into_iter().chain(negative).collect();
        let index = roots.iter().enumerate().map(|(i, r)| (r.coeffs.clone(), i)).collect();

        let highest = roots[..roots.len() / 2]
            .iter()
            .max_by_key(|r| r.height)
            .expect("nonempty root system")
            .clone();
        let marks = highest.coeffs.iter().map(|&c| c as i64).collect();
        let coxeter_number = highest.height as usize + 1;

        let mut rs = RootSystem {
            series,
            rank,
            cartan_matrix,
            gram,
            roots,
            index,
            lowest_root: highest.negated(),
            marks,
            coxeter_number,
            killing_t: Vec::new(),
            killing_t_inv: Vec::new(),
        };
        rs.killing_t = rs.trace_form_on_cartan();
        rs.killing_t_inv = exact::inverse(&rs.killing_t)
            .ok_or_else(|| Error::Construction("Killing form on the Cartan subalgebra is singular".into()))?;
        Ok(rs)
    }

    /// `kappa(H_i, H_j) = sum over roots of beta(H_i) beta(H_j)`, the trace of `ad H_i ad H_j`.
    fn trace_form_on_cartan(&self) -> Vec<Vec<Q>> {
        let n = self.rank;
        let mut k = vec![vec![0i64; n]; n];
        for root in &self.roots {
            let vals: Vec<i64> = (0..n).map(|i| self.eval_on_coroot(&root.coeffs, i)).collect();
            for i in 0..n {
                for j in 0..n {
                    k[i][j] += vals[i] * vals[j];
                }
            }
        }
        k.into_iter().map(|r| r.into_iter().map(q).collect()).collect()
    }

    pub fn roots(&self) -> &[Root] {
        &self.roots
    }

    pub fn positive_roots(&self) -> &[Root] {
        &self.roots[..self.roots.len() / 2]
    }

    pub fn num_positive(&self) -> usize {
        self.roots.len() / 2
    }

    pub fn root_index(&self, coeffs: &[i32]) -> Option<usize> {
        self.index.get(coeffs).copied()
    }

    pub fn is_root(&self, coeffs: &[i32]) -> bool {
        self.index.contains_key(coeffs)
    }

    /// Index of the negative of root `i`.
    pub fn neg_index(&self, i: usize) -> usize {
        let np = self.num_positive();
        if i < np {
            i + np
        } else {
            i - np
        }
    }

    pub fn simple_root(&self, i: usize) -> &Root {
        // simple roots are the first `rank` positive roots (height one)
        &self.roots[self.simple_root_index(i)]
    }

    pub fn simple_root_index(&self, i: usize) -> usize {
        let mut v = vec![0i32; self.rank];
        v[i] = 1;
        self.index[&v]
    }

    pub fn highest_root(&self) -> Root {
        self.lowest_root.negated()
    }

    /// Extended simple roots `alpha_0, alpha_1, ..., alpha_N` (lowest root first).
    pub fn extended_simple_roots(&self) -> Vec<Root> {
        std::iter::once(self.lowest_root.clone())
            .chain((0..self.rank).map(|i| self.simple_root(i).clone()))
            .collect()
    }

    /// Marks `m_0 = 1, m_1, ..., m_N`.
    pub fn extended_marks(&self) -> Vec<i64> {
        std::iter::once(1).chain(self.marks.iter().copied()).collect()
    }

    pub fn height(&self, r: &Root) -> i32 {
        r.coeffs.iter().sum()
    }

    /// Invariant inner product in the integer normalization of the simple-root Gram matrix.
    pub fn inner(&self, a: &[i32], b: &[i32]) -> i64 {
        let n = self.rank;
        let mut s = 0i64;
        for i in 0..n {
            if a[i] == 0 {
                continue;
            }
            for j in 0..n {
                s += a[i] as i64 * self.gram[i][j] * b[j] as i64;
            }
        }
        s
    }

    /// `beta(H_{alpha_i}) = <beta, alpha_i^vee>`.
    pub fn eval_on_coroot(&self, beta: &[i32], i: usize) -> i64 {
        (0..self.rank).map(|j| beta[j] as i64 * self.cartan_matrix[i][j]).sum()
    }

    /// `<beta, alpha^vee> = 2 (beta, alpha) / (alpha, alpha)`.
    pub fn pairing(&self, beta: &[i32], alpha: &[i32]) -> i64 {
        let num = 2 * self.inner(beta, alpha);
        let den = self.inner(alpha, alpha);
        debug_assert_eq!(num % den, 0);
        num / den
    }

    /// Evaluation `alpha(X)` of a root on a Cartan vector.
    pub fn eval(&self, alpha: &[i32], x: &CartanVector<num_complex::Complex64>) -> num_complex::Complex64 {
        (0..self.rank).map(|i| x.0[i] * self.eval_on_coroot(alpha, i) as f64).sum()
    }

    /// Killing form on the Cartan subalgebra in the basis of simple coroots.
    pub fn killing_on_cartan(&self) -> &[Vec<Q>] {
        &self.killing_t
    }

    /// Killing dual `alpha^#`, characterised by `kappa(alpha^#, H) = alpha(H)`.
    pub fn killing_dual(&self, alpha: &[i32]) -> CartanVector<Q> {
        let a: Vec<Q> = (0..self.rank).map(|i| q(self.eval_on_coroot(alpha, i))).collect();
        CartanVector(exact::mat_vec(&self.killing_t_inv, &a))
    }

    /// `kappa(alpha^#, beta^#)`.
    pub fn killing_inner(&self, alpha: &[i32], beta: &[i32]) -> Q {
        let da = self.killing_dual(alpha);
        (0..self.rank).fold(Q::zero(), |acc, i| acc + &da.0[i] * q(self.eval_on_coroot(beta, i)))
    }

    /// `H_alpha = 2 alpha^# / kappa(alpha^#, alpha^#)`.
    pub fn coroot(&self, alpha: &[i32]) -> CartanVector<Q> {
        let d = self.killing_dual(alpha);
        let norm = self.killing_inner(alpha, alpha);
        let f = q(2) / norm;
        CartanVector(d.0.iter().map(|x| x * &f).collect())
    }

    /// Integer coefficients of `H_alpha` in the simple coroot basis.
    pub fn coroot_int(&self, alpha: &[i32]) -> Vec<i64> {
        self.coroot(alpha)
            .0
            .iter()
            .map(|x| exact::to_i64(x).expect("coroots are integral in the simple coroot basis"))
            .collect()
    }

    /// Basis `eta_j` of the Cartan subalgebra dual to the simple roots.
    pub fn dual_basis(&self) -> Result<Vec<CartanVector<Q>>> {
        let c: Vec<Vec<Q>> = self.cartan_matrix.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect();
        let inv = exact::inverse(&c).ok_or_else(|| Error::Construction("singular Cartan matrix".into()))?;
        Ok(inv.into_iter().map(CartanVector).collect())
    }

    /// Applies a linear functional given on the simple coroot basis.
    pub fn eval_exact(&self, alpha: &[i32], x: &CartanVector<Q>) -> Q {
        (0..self.rank).fold(Q::zero(), |acc, i| acc + &x.0[i] * q(self.eval_on_coroot(alpha, i)))
    }

    pub fn extended_diagram(&self) -> ExtendedDiagram {
        ExtendedDiagram::new(self)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "series": self.series.letter().to_string(),
            "rank": self.rank,
            "cartan_matrix": self.cartan_matrix,
            "roots": self.roots.iter().map(|r| serde_json::json!({"coeffs": r.coeffs, "height": r.height})).collect::<Vec<_>>(),
            "marks": self.marks,
            "coxeter_number": self.coxeter_number,
        })
    }
}

/// Checks `sum_{j=0}^N m_j alpha_j^# = 0` exactly.
pub fn vacuum_dual_sum(rs: &RootSystem) -> CartanVector<Q> {
    let marks = rs.extended_marks();
    let mut acc = vec![Q::zero(); rs.rank];
    for (root, m) in rs.extended_simple_roots().iter().zip(marks) {
        let d = rs.killing_dual(&root.coeffs);
        for (a, x) in acc.iter_mut().zip(d.0) {
            *a += x * q(m);
        }
    }
    CartanVector(acc)
}
