use itertools::Itertools;
use serde::{Deserialize, Serialize};

use super::{Root, RootSystem};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    /// Unordered pair `{<alpha_a, alpha_b^vee>, <alpha_b, alpha_a^vee>}`, smaller first.
    pub cartan_pair: (i64, i64),
    pub multiplicity: i64,
    /// Node the arrow points to (the shorter root), if the bond is not simply laced.
    pub arrow_to: Option<usize>,
}

/// Extended Dynkin diagram on the nodes `alpha_0, ..., alpha_N`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExtendedDiagram {
    pub roots: Vec<Root>,
    /// `pairing[i][j] = <alpha_j, alpha_i^vee>`.
    pub pairing: Vec<Vec<i64>>,
    /// Squared lengths in the integer normalization of the root system.
    pub lengths: Vec<i64>,
    pub edges: Vec<Edge>,
}

impl ExtendedDiagram {
    pub fn new(rs: &RootSystem) -> Self {
        let roots = rs.extended_simple_roots();
        let n = roots.len();
        let pairing: Vec<Vec<i64>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 2 } else { rs.pairing(&roots[j].coeffs, &roots[i].coeffs) }).collect())
            .collect();
        let lengths = roots.iter().map(|r| rs.inner(&r.coeffs, &r.coeffs)).collect::<Vec<_>>();
        let mut edges = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                let (x, y) = (pairing[a][b], pairing[b][a]);
                if x == 0 && y == 0 {
                    continue;
                }
                let multiplicity = x * y;
                let arrow_to = if x == y {
                    None
                } else if lengths[a] < lengths[b] {
                    Some(a)
                } else {
                    Some(b)
                };
                edges.push(Edge { a, b, cartan_pair: (x.min(y), x.max(y)), multiplicity, arrow_to });
            }
        }
        ExtendedDiagram { roots, pairing, lengths, edges }
    }

    pub fn num_nodes(&self) -> usize {
        self.roots.len()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|e| e.a == v || e.b == v).count()
    }

    fn unordered(&self, a: usize, b: usize) -> (i64, i64) {
        let (x, y) = (self.pairing[a][b], self.pairing[b][a]);
        (x.min(y), x.max(y))
    }

    /// Whether `perm` preserves node lengths and the unordered Cartan pair of every node pair.
    pub fn preserves(&self, perm: &[usize]) -> bool {
        let n = self.num_nodes();
        perm.len() == n
            && (0..n).all(|a| {
                self.lengths[a] == self.lengths[perm[a]]
                    && (a + 1..n).all(|b| self.unordered(a, b) == self.unordered(perm[a], perm[b]))
            })
    }
}

/// A permutation of the nodes `0..=N` of an extended diagram.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NodePermutation(pub Vec<usize>);

impl NodePermutation {
    pub fn identity(n: usize) -> Self {
        NodePermutation((0..n).collect())
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &j)| i == j)
    }

    pub fn is_involution(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &j)| self.0[j] == i)
    }

    /// `(self ∘ other)(i) = self(other(i))`.
    pub fn compose(&self, other: &NodePermutation) -> NodePermutation {
        NodePermutation(other.0.iter().map(|&j| self.0[j]).collect())
    }

    pub fn inverse(&self) -> NodePermutation {
        let mut inv = vec![0; self.0.len()];
        for (i, &j) in self.0.iter().enumerate() {
            inv[j] = i;
        }
        NodePermutation(inv)
    }

    pub fn fixed_points(&self) -> Vec<usize> {
        (0..self.0.len()).filter(|&i| self.0[i] == i).collect()
    }
}

const BRUTE_FORCE_MAX_NODES: usize = 9;

/// All diagram automorphisms, sorted lexicographically (the identity first).
pub fn diagram_automorphisms(d: &ExtendedDiagram) -> Vec<NodePermutation> {
    let mut out = if d.num_nodes() <= BRUTE_FORCE_MAX_NODES {
        automorphisms_brute_force(d)
    } else {
        automorphisms_backtracking(d)
    };
    out.sort();
    out
}

pub fn involutions(d: &ExtendedDiagram) -> Vec<NodePermutation> {
    diagram_automorphisms(d).into_iter().filter(NodePermutation::is_involution).collect()
}

pub(crate) fn automorphisms_brute_force(d: &ExtendedDiagram) -> Vec<NodePermutation> {
    let n = d.num_nodes();
    (0..n).permutations(n).filter(|p| d.preserves(p)).map(NodePermutation).collect()
}

pub(crate) fn automorphisms_backtracking(d: &ExtendedDiagram) -> Vec<NodePermutation> {
    let n = d.num_nodes();
    let degrees: Vec<usize> = (0..n).map(|v| d.degree(v)).collect();
    let mut out = Vec::new();
    let mut image = vec![usize::MAX; n];
    let mut used = vec![false; n];
    fn extend(
        d: &ExtendedDiagram,
        degrees: &[usize],
        v: usize,
        image: &mut Vec<usize>,
        used: &mut Vec<bool>,
        out: &mut Vec<NodePermutation>,
    ) {
        let n = image.len();
        if v == n {
            out.push(NodePermutation(image.clone()));
            return;
        }
        for w in 0..n {
            if used[w] || degrees[w] != degrees[v] || d.lengths[w] != d.lengths[v] {
                continue;
            }
            if (0..v).any(|u| d.unordered(u, v) != d.unordered(image[u], w)) {
                continue;
            }
            image[v] = w;
            used[w] = true;
            extend(d, degrees, v + 1, image, used, out);
            used[w] = false;
        }
        image[v] = usize::MAX;
    }
    extend(d, &degrees, 0, &mut image, &mut used, &mut out);
    out
}
