//! Lifting extended-diagram involutions to involutions of `g^C`, and the
//! antilinear conjugations defining the corresponding real forms.

mod monomial;

pub use monomial::MonomialMap;

use num_rational::Rational64;
use serde::Serialize;

use crate::chevalley::ChevalleyAlgebra;
use crate::coxeter::CoxeterAutomorphism;
use crate::element::{AlgebraElement, Scalar};
use crate::error::{Error, Result};
use crate::rootsystem::{involutions, NodePermutation, Root, RootSystem};

/// An involution of the extended Dynkin diagram.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DiagramInvolution {
    pub pi: NodePermutation,
}

impl DiagramInvolution {
    pub fn new(rs: &RootSystem, pi: NodePermutation) -> Result<Self> {
        let diagram = rs.extended_diagram();
        if !pi.is_involution() || !diagram.preserves(&pi.0) {
            return Err(Error::domain(format!("{:?} is not an involution of the extended diagram", pi.0)));
        }
        Ok(DiagramInvolution { pi })
    }

    pub fn identity(rs: &RootSystem) -> Self {
        DiagramInvolution { pi: NodePermutation::identity(rs.rank + 1) }
    }

    /// All involutions of the extended diagram, identity first.
    pub fn all(rs: &RootSystem) -> Vec<DiagramInvolution> {
        involutions(&rs.extended_diagram()).into_iter().map(|pi| DiagramInvolution { pi }).collect()
    }

    /// Linear action on root coefficient vectors, `alpha_j -> alpha_{pi(j)}` for `j >= 1`.
    pub fn act(&self, rs: &RootSystem, coeffs: &[i32]) -> Vec<i32> {
        let ext = rs.extended_simple_roots();
        let mut out = vec![0i32; rs.rank];
        for (j, &c) in coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for (o, &e) in out.iter_mut().zip(&ext[self.pi.apply(j + 1)].coeffs) {
                *o += c * e;
            }
        }
        out
    }
}

/// How the sign data `b_{alpha_j}` was found.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum SignSearch {
    AllPositive,
    FixedNodeFlip { node: usize },
    Exhaustive { assignments_tried: usize },
}

/// Involution `Theta` of `g^C` inducing a diagram involution.
#[derive(Debug, Clone)]
pub struct CartanInvolution {
    pub pi: DiagramInvolution,
    /// `b_{alpha_1}, ..., b_{alpha_N}`.
    pub signs: Vec<i64>,
    /// `b_{alpha_0}`, defined by `Theta(R_{alpha_0}) = b_{alpha_0} R_{alpha_{pi(0)}}`.
    pub b0: i64,
    pub search: SignSearch,
    pub map: MonomialMap,
}

impl CartanInvolution {
    pub fn apply<S: Scalar>(&self, alg: &ChevalleyAlgebra, x: &AlgebraElement<S>) -> AlgebraElement<S> {
        self.map.apply(alg, x)
    }

    pub fn matrix(&self, alg: &ChevalleyAlgebra) -> nalgebra::DMatrix<i64> {
        self.map.matrix(alg)
    }

    /// `b_alpha` for every root, from `Theta(R_alpha) = b_alpha R_{pi(alpha)}`.
    pub fn root_signs(&self) -> Vec<i64> {
        self.map.roots.iter().map(|&(_, c)| c).collect()
    }

    pub fn is_involutive(&self, alg: &ChevalleyAlgebra) -> bool {
        self.map.compose(&self.map).is_identity(alg)
    }
}

/// Builds the linear map determined by `pi` and simple-root signs through fixed bracket words.
fn extend_from_generators(alg: &ChevalleyAlgebra, pi: &DiagramInvolution, signs: &[i64]) -> Result<MonomialMap> {
    let rs = &alg.rs;
    let n = rs.rank;
    let np = rs.num_positive();
    let image_root = |a: usize| -> Result<usize> {
        let img = pi.act(rs, &rs.roots()[a].coeffs);
        rs.root_index(&img).ok_or_else(|| Error::Construction(format!("image of root {} is not a root", rs.roots()[a])))
    };
    let mut roots = vec![(usize::MAX, 0i64); alg.num_roots()];
    for a in 0..np {
        let neg = rs.neg_index(a);
        let (b, nb) = (image_root(a)?, image_root(neg)?);
        if a < n {
            roots[a] = (b, signs[a]);
            roots[neg] = (nb, signs[a]);
            continue;
        }
        // R_a = [R_{alpha_i}, R_beta] / N_{alpha_i, beta} with the first admissible simple root.
        let (i, beta) = (0..n)
            .find_map(|i| {
                let mut v = rs.roots()[a].coeffs.clone();
                v[i] -= 1;
                rs.root_index(&v).map(|beta| (i, beta))
            })
            .ok_or_else(|| Error::Construction("positive root without a bracket word".into()))?;
        for (x, y, target, img) in [(i, beta, a, b), (rs.neg_index(i), rs.neg_index(beta), neg, nb)] {
            let (xi, cx) = roots[x];
            let (yi, cy) = roots[y];
            let num = cx * cy * alg.structure_constant(xi, yi);
            let den = alg.structure_constant(x, y);
            if den == 0 || num % den != 0 || alg.root_sum(xi, yi) != Some(img) {
                return Err(Error::Construction(format!("inconsistent bracket word for root {}", rs.roots()[target])));
            }
            roots[target] = (img, num / den);
        }
    }
    let cartan = (0..n)
        .map(|i| {
            let img = &rs.extended_simple_roots()[pi.pi.apply(i + 1)];
            rs.coroot_int(&img.coeffs)
        })
        .collect();
    Ok(MonomialMap { cartan, roots })
}

fn try_signs(alg: &ChevalleyAlgebra, pi: &DiagramInvolution, signs: &[i64], search: SignSearch) -> Result<Option<CartanInvolution>> {
    let map = extend_from_generators(alg, pi, signs)?;
    let rs = &alg.rs;
    let low = rs.root_index(&rs.lowest_root.coeffs).expect("lowest root");
    let b0 = map.roots[low].1;
    let inv = CartanInvolution { pi: pi.clone(), signs: signs.to_vec(), b0, search, map };
    Ok(if inv.is_involutive(alg) { Some(inv) } else { None })
}

/// Free sign variables: one per orbit of `pi` on `{1..N}`.
fn sign_orbits(pi: &DiagramInvolution, n: usize) -> Vec<Vec<usize>> {
    let mut seen = vec![false; n];
    let mut orbits = Vec::new();
    for j in 0..n {
        if seen[j] {
            continue;
        }
        let pj = pi.pi.apply(j + 1);
        seen[j] = true;
        if pj != 0 && pj != j + 1 {
            seen[pj - 1] = true;
            orbits.push(vec![j, pj - 1]);
        } else {
            orbits.push(vec![j]);
        }
    }
    orbits
}

/// Lifts `pi` to an involution `Theta` with `Theta(R_{alpha_j}) = b_j R_{alpha_{pi(j)}}`, `b_j = ±1`.
pub fn lift_involution(alg: &ChevalleyAlgebra, pi: &DiagramInvolution) -> Result<CartanInvolution> {
    let n = alg.rank();
    let plus = vec![1i64; n];
    if let Some(t) = try_signs(alg, pi, &plus, SignSearch::AllPositive)? {
        return Ok(t);
    }
    if let Certificate::FixedOddNode { node, .. } = find_certificate(&alg.rs, pi) {
        let mut s = plus.clone();
        s[node - 1] = -1;
        if let Some(t) = try_signs(alg, pi, &s, SignSearch::FixedNodeFlip { node })? {
            return Ok(t);
        }
    }
    let orbits = sign_orbits(pi, n);
    let total = 1usize << orbits.len();
    for mask in 0..total {
        let mut s = plus.clone();
        for (o, orbit) in orbits.iter().enumerate() {
            if mask >> o & 1 == 1 {
                for &j in orbit {
                    s[j] = -1;
                }
            }
        }
        if let Some(t) = try_signs(alg, pi, &s, SignSearch::Exhaustive { assignments_tried: mask + 1 })? {
            return Ok(t);
        }
    }
    Err(Error::Construction(format!("no sign assignment lifts {:?}", pi.pi.0)))
}

/// Witness that `b_{alpha_0} b_{alpha_{pi(0)}} = 1` can be achieved.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Certificate {
    /// A node `j >= 1` with `pi(j) = j` and `m_j` odd (largest such mark, then smallest index).
    FixedOddNode { node: usize, mark: i64 },
    /// `pi(0) = 0`: nothing to prove.
    LowestRootFixed,
    /// `gamma` may be the zero vector (empty sum of simple roots).
    Gamma { gamma: Root },
    GammaDelta { gamma: Root, delta: Root },
    /// No certificate although `pi(0) != 0`.
    Anomaly,
}

impl Certificate {
    pub fn kind(&self) -> &'static str {
        match self {
            Certificate::FixedOddNode { .. } => "fixed-odd-node",
            Certificate::LowestRootFixed => "lowest-root-fixed",
            Certificate::Gamma { .. } => "gamma",
            Certificate::GammaDelta { .. } => "gamma-delta",
            Certificate::Anomaly => "anomaly",
        }
    }
}

fn add(a: &[i32], b: &[i32]) -> Vec<i32> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn find_certificate(rs: &RootSystem, pi: &DiagramInvolution) -> Certificate {
    let fixed_odd = (1..=rs.rank)
        .filter(|&j| pi.pi.apply(j) == j && rs.marks[j - 1] % 2 == 1)
        .max_by_key(|&j| (rs.marks[j - 1], std::cmp::Reverse(j)));
    if let Some(node) = fixed_odd {
        return Certificate::FixedOddNode { node, mark: rs.marks[node - 1] };
    }
    let p0 = pi.pi.apply(0);
    if p0 == 0 {
        return Certificate::LowestRootFixed;
    }
    let ext = rs.extended_simple_roots();
    let a_p0 = &ext[p0].coeffs;
    // -alpha_0 - alpha_{pi(0)}
    let target: Vec<i32> = ext[0].coeffs.iter().zip(a_p0).map(|(x, y)| -x - y).collect();
    let positive = rs.positive_roots();
    let avoids = |r: &Root| r.coeffs[p0 - 1] == 0;
    // The empty sum is admitted as gamma (it is what the A_N formulas give for small pi(0)).
    let gammas: Vec<Root> = std::iter::once(Root::new(vec![0; rs.rank])).chain(positive.iter().filter(|r| avoids(r)).cloned()).collect();
    for gamma in &gammas {
        let pg = pi.act(rs, &gamma.coeffs);
        if rs.is_root(&add(&pg, a_p0)) && add(&gamma.coeffs, &pg) == target {
            return Certificate::Gamma { gamma: gamma.clone() };
        }
    }
    for gamma in &gammas {
        let pg = pi.act(rs, &gamma.coeffs);
        if !rs.is_root(&add(&pg, a_p0)) {
            continue;
        }
        for delta in positive.iter().filter(|r| avoids(r)) {
            let pd = pi.act(rs, &delta.coeffs);
            let dd = add(&delta.coeffs, &pd);
            if rs.is_root(&dd) && add(&dd, &add(&gamma.coeffs, &pg)) == target {
                return Certificate::GammaDelta { gamma: gamma.clone(), delta: delta.clone() };
            }
        }
    }
    Certificate::Anomaly
}

/// Antilinear map `x -> L(conj x)` with `L` a monomial integer map.
#[derive(Debug, Clone)]
pub struct AntilinearConjugation {
    pub linear: MonomialMap,
    alg_rank: usize,
}

impl AntilinearConjugation {
    pub fn from_linear(alg: &ChevalleyAlgebra, linear: MonomialMap) -> Self {
        AntilinearConjugation { linear, alg_rank: alg.rank() }
    }

    pub fn apply<S: Scalar>(&self, x: &AlgebraElement<S>) -> AlgebraElement<S> {
        let mut out = AlgebraElement::zero(x.dim());
        for (i, c) in x.coeffs.iter().enumerate() {
            let c = c.conj();
            if c.is_zero() {
                continue;
            }
            if i < self.alg_rank {
                for (j, &v) in self.linear.cartan[i].iter().enumerate() {
                    if v != 0 {
                        out.coeffs[j] += c.clone() * S::from_int(v);
                    }
                }
            } else {
                let (b, v) = self.linear.roots[i - self.alg_rank];
                out.coeffs[self.alg_rank + b] += c * S::from_int(v);
            }
        }
        out
    }

    /// `conj^2 = id` (the linear part is real, so this is `L^2 = id`).
    pub fn is_involutive(&self, alg: &ChevalleyAlgebra) -> bool {
        self.linear.compose(&self.linear).is_identity(alg)
    }

    /// Antilinear bracket compatibility reduces to that of the real linear part.
    pub fn is_automorphism(&self, alg: &ChevalleyAlgebra) -> bool {
        self.linear.is_automorphism(alg)
    }

    /// Real dimension of the fixed-point set, from the rank of `conj - id` on `R^{2 dim}`.
    pub fn fixed_real_dimension(&self, alg: &ChevalleyAlgebra) -> usize {
        let dim = alg.dim();
        let l = self.linear.matrix(alg).map(|v| v as f64);
        // real coordinates (Re x, Im x): conj(x) = L Re x - i L Im x
        let mut m = nalgebra::DMatrix::<f64>::zeros(2 * dim, 2 * dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = l[(i, j)];
                m[(dim + i, dim + j)] = -l[(i, j)];
            }
            m[(i, i)] -= 1.0;
            m[(dim + i, dim + i)] -= 1.0;
        }
        2 * dim - m.rank(1e-9)
    }
}

/// `omega_0(H) = -H`, `omega_0(R_alpha) = -R_{-alpha}`, antilinear.
pub fn compact_conjugation(alg: &ChevalleyAlgebra) -> AntilinearConjugation {
    let n = alg.rank();
    let linear = MonomialMap {
        cartan: (0..n).map(|i| (0..n).map(|j| -i64::from(i == j)).collect()).collect(),
        roots: (0..alg.num_roots()).map(|a| (alg.rs.neg_index(a), -1)).collect(),
    };
    AntilinearConjugation::from_linear(alg, linear)
}

/// The complex-linear Chevalley involution `H -> -H`, `R_alpha -> -R_{-alpha}`.
pub fn chevalley_involution(alg: &ChevalleyAlgebra) -> MonomialMap {
    compact_conjugation(alg).linear
}

/// `conj = Theta ∘ omega_0`.
pub fn real_form_conjugation(alg: &ChevalleyAlgebra, theta: &CartanInvolution, omega0: &AntilinearConjugation) -> Result<AntilinearConjugation> {
    let a = theta.map.compose(&omega0.linear);
    let b = omega0.linear.compose(&theta.map);
    if a != b {
        let bad = (0..alg.num_roots()).find(|&r| a.roots[r] != b.roots[r]);
        return Err(Error::Construction(format!("Theta and omega_0 do not commute (first mismatch at root index {bad:?})")));
    }
    Ok(AntilinearConjugation::from_linear(alg, a))
}

/// The permutation `pi` with `conj(alpha_j) = -alpha_{pi(j)}`, read off from `conj(R_{alpha_j})`.
pub fn reality_permutation(alg: &ChevalleyAlgebra, conj: &AntilinearConjugation) -> Result<NodePermutation> {
    let rs = &alg.rs;
    let ext = rs.extended_simple_roots();
    let mut perm = Vec::with_capacity(ext.len());
    for root in &ext {
        let a = rs.root_index(&root.coeffs).expect("extended simple roots are roots");
        let (b, _) = conj.linear.roots[a];
        let minus: Vec<i32> = rs.roots()[b].coeffs.iter().map(|c| -c).collect();
        let j = ext.iter().position(|r| r.coeffs == minus).ok_or_else(|| {
            Error::Construction(format!("conjugate of {} lies outside the negative extended simple roots", root))
        })?;
        perm.push(j);
    }
    Ok(NodePermutation(perm))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CompatibilityReport {
    pub sigma_commutes_with_conj: bool,
    pub sigma_commutes_with_theta: bool,
    pub theta_permutes_extended_simple: bool,
}

impl CompatibilityReport {
    pub fn consistent(&self) -> bool {
        self.sigma_commutes_with_conj == self.sigma_commutes_with_theta
            && self.sigma_commutes_with_theta == self.theta_permutes_extended_simple
    }

    pub fn all_true(&self) -> bool {
        self.sigma_commutes_with_conj && self.sigma_commutes_with_theta && self.theta_permutes_extended_simple
    }
}

/// Evaluates the three equivalent conditions exactly.  Since `sigma` is diagonal with
/// eigenvalue `eps^{h}` on a basis vector of height `h`, `sigma M = M sigma` for a monomial
/// `M` means `M` preserves heights mod `k`, and `sigma conj = conj sigma` for `conj = L ∘ bar`
/// means `L` negates them mod `k`.
pub fn certify_compatibility(alg: &ChevalleyAlgebra, theta: &MonomialMap, sigma: &CoxeterAutomorphism, conj: &AntilinearConjugation) -> CompatibilityReport {
    let k = sigma.k;
    let respects = |m: &MonomialMap, negate: bool| {
        (0..alg.dim()).all(|i| {
            m.image(alg, i).iter().all(|&(j, _)| {
                let target = if negate { (k - sigma.grade(i)) % k } else { sigma.grade(i) };
                sigma.grade(j) == target
            })
        })
    };
    let rs = &alg.rs;
    let ext: Vec<usize> = rs.extended_simple_roots().iter().map(|r| rs.root_index(&r.coeffs).unwrap()).collect();
    let permutes = ext.iter().all(|&a| ext.contains(&theta.roots[a].0));
    CompatibilityReport {
        sigma_commutes_with_conj: respects(&conj.linear, true),
        sigma_commutes_with_theta: respects(theta, false),
        theta_permutes_extended_simple: permutes,
    }
}

/// A real form indexed by its position in the sorted involution list (0 = compact form).
#[derive(Debug, Clone)]
pub struct RealForm {
    pub id: usize,
    pub theta: CartanInvolution,
    pub conj: AntilinearConjugation,
    pub certificate: Certificate,
}

impl RealForm {
    pub fn new(alg: &ChevalleyAlgebra, id: usize) -> Result<Self> {
        let all = DiagramInvolution::all(&alg.rs);
        let pi = all
            .get(id)
            .ok_or_else(|| Error::domain(format!("real form id {id} out of range (0..{})", all.len())))?;
        let theta = lift_involution(alg, pi)?;
        let conj = real_form_conjugation(alg, &theta, &compact_conjugation(alg))?;
        let certificate = find_certificate(&alg.rs, pi);
        Ok(RealForm { id, theta, conj, certificate })
    }

    pub fn compact(alg: &ChevalleyAlgebra) -> Self {
        Self::new(alg, 0).expect("the identity always lifts")
    }
}

/// `b_alpha * b_{-alpha}` for every simple root, which must be `1`.
pub fn simple_sign_products(alg: &ChevalleyAlgebra, theta: &CartanInvolution) -> Vec<i64> {
    (0..alg.rank()).map(|j| theta.map.roots[j].1 * theta.map.roots[alg.rs.neg_index(j)].1).collect()
}

/// Exact check that `Theta(H_{alpha_j}) = H_{alpha_{pi(j)}}`.
pub fn maps_coroots(alg: &ChevalleyAlgebra, theta: &CartanInvolution) -> bool {
    let rs = &alg.rs;
    let ext = rs.extended_simple_roots();
    (0..alg.rank()).all(|j| {
        let h: AlgebraElement<Rational64> = alg.basis_element(j);
        let img = theta.apply(alg, &h);
        let expect = rs.coroot_int(&ext[theta.pi.pi.apply(j + 1)].coeffs);
        (0..alg.rank()).all(|i| img.coeffs[i] == Rational64::from_integer(expect[i]))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootsystem::{all_types, Series};
    use num_complex::Complex64;

    fn alg(s: Series, n: usize) -> ChevalleyAlgebra {
        ChevalleyAlgebra::from_type(s, n).unwrap()
    }

    #[test]
    fn a2_transposition_fixing_zero() {
        let g = alg(Series::A, 2);
        let pi = DiagramInvolution::new(&g.rs, NodePermutation(vec![0, 2, 1])).unwrap();
        let theta = lift_involution(&g, &pi).unwrap();
        assert!(theta.is_involutive(&g));
        assert!(theta.map.is_automorphism(&g));
        assert_eq!(theta.map.cartan[0], vec![0, 1]);
        assert!(maps_coroots(&g, &theta));
        let conj = real_form_conjugation(&g, &theta, &compact_conjugation(&g)).unwrap();
        // conj(alpha_1) = -alpha_2
        let (b, _) = conj.linear.roots[0];
        assert_eq!(g.rs.roots()[b].coeffs, vec![0, -1]);
        assert_eq!(reality_permutation(&g, &conj).unwrap(), pi.pi);
        let report = certify_compatibility(&g, &theta.map, &CoxeterAutomorphism::new(&g), &conj);
        assert!(report.all_true());
    }

    #[test]
    fn non_involutions_rejected() {
        let g = alg(Series::A, 2);
        assert!(DiagramInvolution::new(&g.rs, NodePermutation(vec![1, 2, 0])).is_err());
        let b = alg(Series::B, 3);
        assert!(DiagramInvolution::new(&b.rs, NodePermutation(vec![0, 1, 3, 2])).is_err());
    }

    #[test]
    fn compact_conjugation_properties() {
        let g = alg(Series::A, 2);
        let w = compact_conjugation(&g);
        let r1: crate::element::FloatElement = g.basis_element(2);
        let img = w.apply(&r1);
        let neg = g.root_basis(g.rs.neg_index(0));
        assert_eq!(img.coeffs[neg], Complex64::new(-1.0, 0.0));
        assert!(w.is_involutive(&g));
        assert!(w.is_automorphism(&g));
        assert!(reality_permutation(&g, &w).unwrap().is_identity());
        assert_eq!(w.fixed_real_dimension(&g), g.dim());
    }

    #[test]
    fn identity_lift_gives_compact_form() {
        let g = alg(Series::G, 2);
        let rf = RealForm::compact(&g);
        assert!(rf.theta.map.is_identity(&g));
        assert_eq!(rf.conj.linear, compact_conjugation(&g).linear);
    }

    #[test]
    fn antilinearity() {
        let g = alg(Series::A, 2);
        let rf = RealForm::new(&g, 1).unwrap();
        let x: crate::element::FloatElement = AlgebraElement::from_coeffs((0..8).map(|i| Complex64::new(i as f64, 1.0 - i as f64)).collect());
        let i = Complex64::new(0.0, 1.0);
        let lhs = rf.conj.apply(&x.scale(&i));
        let rhs = rf.conj.apply(&x).scale(&-i);
        assert!(lhs.distance(&rhs) < 1e-15);
        assert!(rf.conj.apply(&rf.conj.apply(&x)).distance(&x) < 1e-15);
        let y: crate::element::FloatElement = g.basis_element(5);
        let br = g.bracket(&rf.conj.apply(&x), &rf.conj.apply(&y));
        assert!(br.distance(&rf.conj.apply(&g.bracket(&x, &y))) < 1e-12);
        assert_eq!(rf.conj.fixed_real_dimension(&g), g.dim());
    }

    #[test]
    fn certificates_for_classical_examples() {
        let b4 = alg(Series::B, 4);
        let inv: Vec<_> = DiagramInvolution::all(&b4.rs);
        assert_eq!(inv.len(), 2);
        assert_eq!(find_certificate(&b4.rs, &inv[1]), Certificate::Gamma { gamma: Root::new(vec![0, 1, 1, 1]) });

        let c4 = alg(Series::C, 4);
        let inv = DiagramInvolution::all(&c4.rs);
        assert_eq!(inv.len(), 2);
        assert_eq!(inv[1].pi.0, vec![4, 3, 2, 1, 0]);
        assert_eq!(find_certificate(&c4.rs, &inv[1]), Certificate::Gamma { gamma: Root::new(vec![1, 1, 1, 0]) });

        let a3 = alg(Series::A, 3);
        let rotation = DiagramInvolution::new(&a3.rs, NodePermutation(vec![2, 3, 0, 1])).unwrap();
        assert_eq!(find_certificate(&a3.rs, &rotation), Certificate::Gamma { gamma: Root::new(vec![1, 0, 0]) });
        let theta = lift_involution(&a3, &rotation).unwrap();
        assert!(theta.is_involutive(&a3));
    }

    #[test]
    fn e6_certificates_use_alpha4() {
        let rs = RootSystem::new(Series::E, 6).unwrap();
        for pi in DiagramInvolution::all(&rs) {
            assert_eq!(find_certificate(&rs, &pi), Certificate::FixedOddNode { node: 4, mark: 3 });
        }
    }

    #[test]
    fn e7_gamma_certificate() {
        let rs = RootSystem::new(Series::E, 7).unwrap();
        let inv = DiagramInvolution::all(&rs);
        assert_eq!(inv.len(), 2);
        let pi = &inv[1];
        assert_eq!(pi.pi.apply(0), 7);
        let Certificate::Gamma { gamma } = find_certificate(&rs, pi) else { panic!("expected gamma") };
        assert_eq!(gamma.coeffs, vec![1, 1, 2, 2, 1, 1, 0]);
        let pg = pi.act(&rs, &gamma.coeffs);
        assert_eq!(pg, vec![1, 1, 1, 2, 2, 1, 0]);
        let total: Vec<i32> = (0..7).map(|i| gamma.coeffs[i] + pg[i] + i32::from(i == 6)).collect();
        assert_eq!(total, rs.highest_root().coeffs);
    }

    #[test]
    fn lifts_up_to_rank_five() {
        for (s, n) in all_types(5) {
            let g = alg(s, n);
            let sigma = CoxeterAutomorphism::new(&g);
            let omega = compact_conjugation(&g);
            for pi in DiagramInvolution::all(&g.rs) {
                let theta = lift_involution(&g, &pi).unwrap();
                assert!(theta.is_involutive(&g), "{s}{n} {:?}", pi.pi);
                assert!(theta.map.is_automorphism(&g));
                assert!(maps_coroots(&g, &theta));
                assert!(simple_sign_products(&g, &theta).iter().all(|&p| p == 1));
                let p0 = pi.pi.apply(0);
                let b_p0 = if p0 == 0 { theta.b0 } else { theta.signs[p0 - 1] };
                assert_eq!(theta.b0 * b_p0, 1);
                let cert = find_certificate(&g.rs, &pi);
                assert_ne!(cert, Certificate::Anomaly, "{s}{n} {:?}", pi.pi);
                if matches!(cert, Certificate::Gamma { .. } | Certificate::GammaDelta { .. }) {
                    assert_eq!(theta.search, SignSearch::AllPositive);
                }
                let conj = real_form_conjugation(&g, &theta, &omega).unwrap();
                assert!(conj.is_involutive(&g));
                assert_eq!(reality_permutation(&g, &conj).unwrap(), pi.pi);
                let r = certify_compatibility(&g, &theta.map, &sigma, &conj);
                assert!(r.all_true());
            }
        }
    }

    #[test]
    fn chevalley_involution_fails_compatibility() {
        for (s, n) in [(Series::A, 2), (Series::B, 3), (Series::G, 2)] {
            let g = alg(s, n);
            let chev = chevalley_involution(&g);
            assert!(chev.is_automorphism(&g));
            let split = AntilinearConjugation::from_linear(&g, chev.compose(&compact_conjugation(&g).linear));
            assert!(reality_permutation(&g, &split).is_err());
            let r = certify_compatibility(&g, &chev, &CoxeterAutomorphism::new(&g), &split);
            assert!(r.consistent());
            assert!(!r.sigma_commutes_with_conj && !r.sigma_commutes_with_theta && !r.theta_permutes_extended_simple);
        }
    }

    #[test]
    fn compatibility_against_float_sigma() {
        // Cross-check the exact height criterion against direct application of sigma.
        let g = alg(Series::A, 3);
        let sigma = CoxeterAutomorphism::new(&g);
        for pi in DiagramInvolution::all(&g.rs) {
            let theta = lift_involution(&g, &pi).unwrap();
            let mut max: f64 = 0.0;
            for i in 0..g.dim() {
                let e: crate::element::FloatElement = g.basis_element(i);
                let a = sigma.apply(&theta.apply(&g, &e));
                let b = theta.apply(&g, &sigma.apply(&e));
                max = max.max(a.distance(&b));
            }
            assert!(max < 1e-12);
        }
    }
}
