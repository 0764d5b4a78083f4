//! Affine Toda fields: residuals of the Toda equation in dual-vector, bracket and frame form,
//! reconstruction of `Omega` from an adapted polynomial Killing field, and the normalization
//! invariant of the cyclic data.

mod recursion;

pub use recursion::{build_yl, build_yl_grid, formal_killing_recursion, jacobi_residual, GlSplitting, RecursionResult};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::coxeter::{ad_exp_cartan, extended_simple_basis, grading_defect, is_cyclic, DEFAULT_CYCLIC_TOLERANCE};
use crate::element::FloatElement;
use crate::error::{Error, Result};
use crate::exact;
use crate::fd;
use crate::laxflow::{conj_signs, cyclic_element, lax_field, FieldGrid, FlowContext, GridKind, ResidualReport};
use crate::rootsystem::{CartanVector, NodePermutation};

type CV = CartanVector<Complex64>;

fn c0() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// Cyclic element `W = sum_j r_j R_{alpha_j}` together with the reality data it is used with.
#[derive(Debug, Clone)]
pub struct CyclicData {
    pub r: Vec<Complex64>,
    pub w: FloatElement,
    pub w_conj: FloatElement,
    /// `conj(alpha_j) = -alpha_{pi(j)}`.
    pub pi: NodePermutation,
    /// `conj(R_{alpha_j}) = s_j R_{-alpha_{pi(j)}}`.
    pub signs: Vec<i64>,
    /// Coefficients `m_j` of `[W, conj W] = sum_j m_j alpha_j^#`.
    pub masses: Vec<Complex64>,
    /// Killing duals `alpha_j^#` in the simple coroot basis.
    pub duals: Vec<Vec<f64>>,
    pub cyclic: bool,
}

impl CyclicData {
    pub fn new(ctx: &FlowContext, r: Vec<Complex64>) -> Result<Self> {
        let w = cyclic_element(&ctx.alg, &r)?;
        let rs = &ctx.alg.rs;
        let ext = rs.extended_simple_roots();
        let signs = conj_signs(ctx);
        let pi = ctx.reality.clone();
        let mut masses = Vec::with_capacity(ext.len());
        let mut duals = Vec::with_capacity(ext.len());
        for (j, root) in ext.iter().enumerate() {
            let l = pi.apply(j);
            let norm = exact::to_f64(&rs.killing_inner(&root.coeffs, &root.coeffs));
            masses.push(r[j] * r[l].conj() * signs[l] as f64 * 2.0 / norm);
            duals.push(rs.killing_dual(&root.coeffs).0.iter().map(exact::to_f64).collect());
        }
        let cyclic = is_cyclic(&ctx.alg, &ctx.sigma, &w, DEFAULT_CYCLIC_TOLERANCE)?;
        let w_conj = ctx.conj().apply(&w);
        Ok(CyclicData { r, w, w_conj, pi, signs, masses, duals, cyclic })
    }

    /// Reads `r_j` off the extended simple root components of `w`.
    pub fn from_element(ctx: &FlowContext, w: &FloatElement) -> Result<Self> {
        if grading_defect(&ctx.sigma, w, 1) > 1e-12 * w.max_abs().max(1.0) {
            return Err(Error::domain("W is not in g_1"));
        }
        Self::new(ctx, extended_simple_basis(&ctx.alg).iter().map(|&i| w.coeffs[i]).collect())
    }

    /// Largest `|m_{pi(j)} - conj(m_j)|`.
    pub fn mass_hypothesis_defect(&self) -> f64 {
        (0..self.masses.len()).map(|j| (self.masses[self.pi.apply(j)] - self.masses[j].conj()).norm()).fold(0.0, f64::max)
    }

    /// `r_0 prod_j r_j^{m_j}` with the marks `m_j`.
    pub fn normalization_constant(&self, marks: &[i64]) -> Complex64 {
        normalization_product(&self.r, marks)
    }
}

fn normalization_product(c: &[Complex64], marks: &[i64]) -> Complex64 {
    c.iter().zip(marks).map(|(x, &m)| x.powi(m as i32)).product()
}

fn cartan_element(ctx: &FlowContext, v: &CV) -> FloatElement {
    let mut e = ctx.alg.zero();
    e.coeffs[..v.len()].copy_from_slice(&v.0);
    e
}

type Node = (usize, usize);

/// `conj` restricted to the Cartan subalgebra.
pub fn conj_cartan(ctx: &FlowContext, v: &CV) -> CV {
    CartanVector(ctx.conj().apply(&cartan_element(ctx, v)).coeffs[..v.len()].to_vec())
}

fn root_eval(ctx: &FlowContext, coeffs: &[i32], v: &CV) -> Complex64 {
    ctx.alg.rs.eval(coeffs, v)
}

/// A grid of Cartan vectors `Omega`, optionally with the exact `Omega_z` alongside.
#[derive(Debug, Clone)]
pub struct TodaField {
    pub omega: FieldGrid,
    pub omega_z: Option<FieldGrid>,
}

impl TodaField {
    pub fn new(omega: FieldGrid) -> Result<Self> {
        if omega.kind != GridKind::Cartan {
            return Err(Error::Precondition("Toda field must be a Cartan grid".into()));
        }
        Ok(TodaField { omega, omega_z: None })
    }

    pub fn from_fn(ctx: &FlowContext, nx: usize, ny: usize, h: f64, f: impl Fn(f64, f64) -> CV) -> Self {
        let mut g = FieldGrid::new(GridKind::Cartan, ctx.grid_meta(h), nx, ny);
        for iy in 0..=ny {
            for ix in 0..=nx {
                g.set_cartan(ix, iy, &f(ix as f64 * h, iy as f64 * h));
            }
        }
        TodaField { omega: g, omega_z: None }
    }

    pub fn constant(ctx: &FlowContext, value: CV, nx: usize, ny: usize, h: f64) -> Self {
        Self::from_fn(ctx, nx, ny, h, |_, _| value.clone())
    }

    pub fn nx(&self) -> usize {
        self.omega.nx
    }

    pub fn ny(&self) -> usize {
        self.omega.ny
    }

    pub fn h(&self) -> f64 {
        self.omega.h
    }

    pub fn at(&self, ix: usize, iy: usize) -> CV {
        self.omega.cartan_at(ix, iy)
    }

    /// `max |Omega + conj(Omega)|`; zero when `Omega` is `i t`-valued.
    pub fn reality_defect(&self, ctx: &FlowContext) -> f64 {
        let mut m: f64 = 0.0;
        for iy in 0..=self.ny() {
            for ix in 0..=self.nx() {
                let v = self.at(ix, iy);
                let c = conj_cartan(ctx, &v);
                m = m.max(v.0.iter().zip(&c.0).map(|(a, b)| (a + b).norm()).fold(0.0, f64::max));
            }
        }
        m
    }

    fn require_real(&self, ctx: &FlowContext) -> Result<()> {
        let scale = self.omega.data().iter().map(|c| c.norm()).fold(0.0, f64::max).max(1.0);
        let defect = self.reality_defect(ctx);
        if defect > 1e-10 * scale {
            return Err(Error::Precondition(format!("Omega is not i t-valued (defect {defect:e})")));
        }
        Ok(())
    }

    /// `(Omega_z, Omega_zbar)`; the stored `Omega_z` if present, else fourth-order differences (margin 2).
    pub fn derivatives(&self, ctx: &FlowContext, ix: usize, iy: usize) -> (CV, CV) {
        let oz = match &self.omega_z {
            Some(g) => g.cartan_at(ix, iy),
            None => {
                let h = self.h();
                let g = &self.omega;
                let dx = fd::central4(g.node(ix - 2, iy), g.node(ix - 1, iy), g.node(ix + 1, iy), g.node(ix + 2, iy), h);
                let dy = fd::central4(g.node(ix, iy - 2), g.node(ix, iy - 1), g.node(ix, iy + 1), g.node(ix, iy + 2), h);
                CartanVector(fd::wirtinger(&dx, &dy).0)
            }
        };
        let ozb = CartanVector(conj_cartan(ctx, &oz).0.iter().map(|c| -c).collect());
        (oz, ozb)
    }

    /// Smallest node margin at which [`Self::derivatives`] is available.
    pub fn derivative_margin(&self) -> usize {
        if self.omega_z.is_some() {
            0
        } else {
            2
        }
    }

    /// `2 Omega_{z zbar} = Delta Omega / 2` by the five-point Laplacian.
    pub fn laplacian_term(&self, ix: usize, iy: usize) -> Vec<Complex64> {
        let g = &self.omega;
        fd::laplacian5(g.node(ix, iy), g.node(ix + 1, iy), g.node(ix - 1, iy), g.node(ix, iy + 1), g.node(ix, iy - 1), g.h)
            .into_iter()
            .map(|c| 0.5 * c)
            .collect()
    }
}

/// `sum_j m_j exp(2 alpha_j(Omega)) alpha_j^#`.
pub fn toda_rhs_dual(ctx: &FlowContext, masses: &[Complex64], duals: &[Vec<f64>], omega: &CV) -> Vec<Complex64> {
    let ext = ctx.alg.rs.extended_simple_roots();
    let mut out = vec![c0(); ctx.alg.rank()];
    for (j, root) in ext.iter().enumerate() {
        let f = masses[j] * (2.0 * root_eval(ctx, &root.coeffs, omega)).exp();
        for (o, d) in out.iter_mut().zip(&duals[j]) {
            *o += f * d;
        }
    }
    out
}

/// `Ad_{exp Omega} W` and `Ad_{exp -Omega} conj(W)`.
pub fn twisted_w(ctx: &FlowContext, data: &CyclicData, omega: &CV) -> (FloatElement, FloatElement) {
    let neg = CartanVector(omega.0.iter().map(|c| -c).collect());
    (ad_exp_cartan(&ctx.alg, omega, &data.w), ad_exp_cartan(&ctx.alg, &neg, &data.w_conj))
}

/// `[Ad_{exp Omega} W, Ad_{exp -Omega} conj(W)]`.
pub fn toda_rhs_bracket(ctx: &FlowContext, data: &CyclicData, omega: &CV) -> FloatElement {
    let (a, b) = twisted_w(ctx, data, omega);
    ctx.alg.bracket(&a, &b)
}

fn interior(nx: usize, ny: usize, m: usize) -> Vec<(usize, usize)> {
    if nx < 2 * m || ny < 2 * m {
        return Vec::new();
    }
    (m..=ny - m).flat_map(|iy| (m..=nx - m).map(move |ix| (ix, iy))).collect()
}

fn sup_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// `sup |2 Omega_{z zbar} - sum_j m_j e^{2 alpha_j(Omega)} alpha_j^#|` over interior nodes, with the given masses.
pub fn toda_residual_with_masses(ctx: &FlowContext, field: &TodaField, masses: &[Complex64]) -> Result<ResidualReport> {
    if field.nx() < 2 || field.ny() < 2 {
        return Err(Error::Precondition("Toda residual needs at least 3x3 nodes".into()));
    }
    let rs = &ctx.alg.rs;
    let duals: Vec<Vec<f64>> = rs.extended_simple_roots().iter().map(|r| rs.killing_dual(&r.coeffs).0.iter().map(exact::to_f64).collect()).collect();
    let sup = interior(field.nx(), field.ny(), 1)
        .par_iter()
        .map(|&(ix, iy)| sup_diff(&field.laplacian_term(ix, iy), &toda_rhs_dual(ctx, masses, &duals, &field.at(ix, iy))))
        .reduce(|| 0.0, f64::max);
    let mut report = ResidualReport::new();
    report.push("toda", field.h(), sup, None);
    Ok(report)
}

/// Toda residual with the masses of `data`.
pub fn toda_residual(ctx: &FlowContext, field: &TodaField, data: &CyclicData) -> Result<ResidualReport> {
    toda_residual_with_masses(ctx, field, &data.masses)
}

/// Pointwise agreement of the bracket and dual-vector right-hand sides at every node
/// (`bracket_vs_dual`), and the size of any non-Cartan part of the bracket (`bracket_off_cartan`).
pub fn toda_bracket_form(ctx: &FlowContext, field: &TodaField, data: &CyclicData) -> ResidualReport {
    let n = ctx.alg.rank();
    let nodes = interior(field.nx(), field.ny(), 0);
    let (agree, off) = nodes
        .par_iter()
        .map(|&(ix, iy)| {
            let omega = field.at(ix, iy);
            let b = toda_rhs_bracket(ctx, data, &omega);
            let d = toda_rhs_dual(ctx, &data.masses, &data.duals, &omega);
            (sup_diff(&b.coeffs[..n], &d), b.coeffs[n..].iter().map(|c| c.norm()).fold(0.0, f64::max))
        })
        .reduce(|| (0.0, 0.0), |a, b| (a.0.max(b.0), a.1.max(b.1)));
    let mut report = ResidualReport::new();
    report.push("bracket_vs_dual", field.h(), agree, None);
    report.push("bracket_off_cartan", field.h(), off, None);
    report
}

/// Builds `phi = (Omega_z + Ad_{exp Omega} W) dz + (-Omega_zbar + Ad_{exp -Omega} conj W) dzbar`,
/// reports its Maurer-Cartan residual (`frame_mc`) and the distance of that residual from
/// `-2 Omega_{z zbar} + [Ad_{exp Omega} W, Ad_{exp -Omega} conj W]` (`frame_identity`).
pub fn toda_frame_form(ctx: &FlowContext, field: &TodaField, data: &CyclicData) -> Result<ResidualReport> {
    field.require_real(ctx)?;
    let m0 = field.derivative_margin().max(1);
    let m1 = m0 + 2;
    if field.nx() < 2 * m1 || field.ny() < 2 * m1 {
        return Err(Error::Precondition("grid too small for the frame form".into()));
    }
    let (w, h) = (field.nx() + 1, field.h());
    let nodes = interior(field.nx(), field.ny(), m0);
    let phis: Vec<(Node, Vec<Complex64>, Vec<Complex64>)> = nodes
        .par_iter()
        .map(|&(ix, iy)| {
            let omega = field.at(ix, iy);
            let (oz, ozb) = field.derivatives(ctx, ix, iy);
            let (a, b) = twisted_w(ctx, data, &omega);
            let mut pz = a.coeffs;
            let mut pzb = b.coeffs;
            for l in 0..oz.len() {
                pz[l] += oz.0[l];
                pzb[l] -= ozb.0[l];
            }
            ((ix, iy), pz, pzb)
        })
        .collect();
    let mut pz = vec![Vec::new(); w * (field.ny() + 1)];
    let mut pzb = pz.clone();
    for ((ix, iy), a, b) in phis {
        pz[iy * w + ix] = a;
        pzb[iy * w + ix] = b;
    }
    let (mc, ident) = interior(field.nx(), field.ny(), m1)
        .par_iter()
        .map(|&(ix, iy)| {
            let at = |f: &Vec<Vec<Complex64>>, i: usize, j: usize| f[j * w + i].clone();
            let dx = |f: &Vec<Vec<Complex64>>| fd::central4(&at(f, ix - 2, iy), &at(f, ix - 1, iy), &at(f, ix + 1, iy), &at(f, ix + 2, iy), h);
            let dy = |f: &Vec<Vec<Complex64>>| fd::central4(&at(f, ix, iy - 2), &at(f, ix, iy - 1), &at(f, ix, iy + 1), &at(f, ix, iy + 2), h);
            let (bz, _) = fd::wirtinger(&dx(&pzb), &dy(&pzb));
            let (_, azb) = fd::wirtinger(&dx(&pz), &dy(&pz));
            let a = FloatElement::from_coeffs(at(&pz, ix, iy));
            let b = FloatElement::from_coeffs(at(&pzb, ix, iy));
            let br = ctx.alg.bracket(&a, &b);
            let res: Vec<Complex64> = (0..br.dim()).map(|i| bz[i] - azb[i] + br.coeffs[i]).collect();
            let mut expected = toda_rhs_bracket(ctx, data, &field.at(ix, iy)).coeffs;
            for (e, l) in expected.iter_mut().zip(field.laplacian_term(ix, iy)) {
                *e -= l;
            }
            (fd::sup_norm(&res), sup_diff(&res, &expected))
        })
        .reduce(|| (0.0, 0.0), |a, b| (a.0.max(b.0), a.1.max(b.1)));
    let mut report = ResidualReport::new();
    report.push("frame_mc", h, mc, None);
    report.push("frame_identity", h, ident, None);
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PathRule {
    /// Trapezoid rule on `Omega_x`, `Omega_y`.
    Trapezoid,
    /// Trapezoid rule with the endpoint-derivative correction, using second derivatives of
    /// `Omega` taken from the Lax field (fourth order).
    Hermite,
}

#[derive(Debug, Clone)]
pub struct Reconstruction {
    pub field: TodaField,
    pub rule: PathRule,
    /// Largest difference between x-then-y and y-then-x path integration.
    pub loop_defect: f64,
    /// `max |Omega + conj Omega|` before projection onto `i t`.
    pub reality_defect: f64,
}

struct NodeDerivs {
    oz: Vec<Complex64>,
    ox: Vec<Complex64>,
    oy: Vec<Complex64>,
    oxx: Vec<Complex64>,
    oyy: Vec<Complex64>,
}

fn node_derivs(ctx: &FlowContext, grid: &FieldGrid, ix: usize, iy: usize, d: i64) -> NodeDerivs {
    let n = ctx.alg.rank();
    let xi = grid.loop_at(ix, iy);
    let half = Complex64::new(0.5, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let cart = |e: &FloatElement| CartanVector(e.coeffs[..n].to_vec());
    let g = cart(&xi.coeff(d - 1).scale(&half));
    let (x, y) = lax_field(ctx, &xi).expect("validated grid");
    let gx = cart(&x.coeff(d - 1).scale(&half));
    let gy = cart(&y.coeff(d - 1).scale(&half));
    let (cg, cgx, cgy) = (conj_cartan(ctx, &g), conj_cartan(ctx, &gx), conj_cartan(ctx, &gy));
    NodeDerivs {
        ox: (0..n).map(|l| g.0[l] - cg.0[l]).collect(),
        oy: (0..n).map(|l| i * (g.0[l] + cg.0[l])).collect(),
        oxx: (0..n).map(|l| gx.0[l] - cgx.0[l]).collect(),
        oyy: (0..n).map(|l| i * (gy.0[l] + cgy.0[l])).collect(),
        oz: g.0,
    }
}

fn step(acc: &[Complex64], f0: &[Complex64], f1: &[Complex64], d0: &[Complex64], d1: &[Complex64], h: f64, rule: PathRule) -> Vec<Complex64> {
    (0..acc.len())
        .map(|l| {
            let mut v = acc[l] + 0.5 * h * (f0[l] + f1[l]);
            if rule == PathRule::Hermite {
                v += h * h / 12.0 * (d0[l] - d1[l]);
            }
            v
        })
        .collect()
}

/// `Omega` from `Omega_z = xi_{d-1} / 2`, integrated from `Omega(0) = 0` along x then y.
pub fn reconstruct_omega(ctx: &FlowContext, grid: &FieldGrid, rule: PathRule) -> Result<Reconstruction> {
    let d = match grid.kind {
        GridKind::Loop { d } => d as i64,
        GridKind::Cartan => return Err(Error::Precondition("expected a loop grid".into())),
    };
    ctx.check_degree(d as usize)?;
    let (nx, ny, h, n) = (grid.nx, grid.ny, grid.h, ctx.alg.rank());
    let w = nx + 1;
    let nodes: Vec<(usize, usize)> = interior(nx, ny, 0);
    for &(ix, iy) in &nodes {
        let xi = grid.loop_at(ix, iy);
        let c = xi.coeff(d - 1);
        if grading_defect(&ctx.sigma, c, d - 1) > 1e-10 * xi.max_abs().max(1.0) {
            return Err(Error::Precondition(format!("xi_(d-1) leaves the Cartan subalgebra at node ({ix},{iy})")));
        }
    }
    let derivs: Vec<NodeDerivs> = nodes.par_iter().map(|&(ix, iy)| node_derivs(ctx, grid, ix, iy, d)).collect();
    let at = |ix: usize, iy: usize| &derivs[iy * w + ix];

    let mut p1 = vec![vec![c0(); n]; w * (ny + 1)];
    let mut p2 = p1.clone();
    for ix in 1..=nx {
        let (a, b) = (at(ix - 1, 0), at(ix, 0));
        p1[ix] = step(&p1[ix - 1], &a.ox, &b.ox, &a.oxx, &b.oxx, h, rule);
    }
    for iy in 1..=ny {
        for ix in 0..=nx {
            let (a, b) = (at(ix, iy - 1), at(ix, iy));
            p1[iy * w + ix] = step(&p1[(iy - 1) * w + ix], &a.oy, &b.oy, &a.oyy, &b.oyy, h, rule);
        }
    }
    for iy in 1..=ny {
        let (a, b) = (at(0, iy - 1), at(0, iy));
        p2[iy * w] = step(&p2[(iy - 1) * w], &a.oy, &b.oy, &a.oyy, &b.oyy, h, rule);
    }
    for iy in 0..=ny {
        for ix in 1..=nx {
            let (a, b) = (at(ix - 1, iy), at(ix, iy));
            p2[iy * w + ix] = step(&p2[iy * w + ix - 1], &a.ox, &b.ox, &a.oxx, &b.oxx, h, rule);
        }
    }
    let loop_defect = p1.iter().zip(&p2).map(|(a, b)| sup_diff(a, b)).fold(0.0, f64::max);

    let mut omega = FieldGrid::new(GridKind::Cartan, ctx.grid_meta(h), nx, ny);
    let mut omega_z = omega.clone();
    let mut reality: f64 = 0.0;
    for &(ix, iy) in &nodes {
        let v = CartanVector(p1[iy * w + ix].clone());
        let c = conj_cartan(ctx, &v);
        reality = reality.max(v.0.iter().zip(&c.0).map(|(a, b)| (a + b).norm()).fold(0.0, f64::max));
        omega.set_cartan(ix, iy, &CartanVector((0..n).map(|l| 0.5 * (v.0[l] - c.0[l])).collect()));
        omega_z.set_cartan(ix, iy, &CartanVector(at(ix, iy).oz.clone()));
    }
    Ok(Reconstruction { field: TodaField { omega, omega_z: Some(omega_z) }, rule, loop_defect, reality_defect: reality })
}

/// As [`reconstruct_omega`], failing with [`Error::NonIntegrable`] when the loop defect exceeds `tol`.
pub fn reconstruct_omega_checked(ctx: &FlowContext, grid: &FieldGrid, rule: PathRule, tol: f64) -> Result<Reconstruction> {
    let rec = reconstruct_omega(ctx, grid, rule)?;
    if rec.loop_defect > tol {
        return Err(Error::NonIntegrable(format!("loop defect {:e} exceeds {tol:e}", rec.loop_defect)));
    }
    Ok(rec)
}

/// `max |Ad_{exp -Omega} xi_d - xi_d(0)| / max |xi_d(0)|` over the grid.
pub fn w_constancy(ctx: &FlowContext, grid: &FieldGrid, field: &TodaField) -> Result<f64> {
    let d = grid.d().ok_or_else(|| Error::Precondition("expected a loop grid".into()))? as i64;
    let w0 = grid.loop_at(0, 0).coeff(d).clone();
    let scale = w0.max_abs();
    if scale == 0.0 {
        return Err(Error::Precondition("xi_d vanishes at the origin".into()));
    }
    let drift = interior(grid.nx, grid.ny, 0)
        .par_iter()
        .map(|&(ix, iy)| {
            let neg = CartanVector(field.at(ix, iy).0.iter().map(|c| -c).collect());
            ad_exp_cartan(&ctx.alg, &neg, grid.loop_at(ix, iy).coeff(d)).distance(&w0)
        })
        .reduce(|| 0.0, f64::max);
    Ok(drift / scale)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PeriodReport {
    pub omega_z: f64,
    pub exp_omega: f64,
}

/// Period defects of `Omega_z` and of `exp(alpha_j(Omega))` under shifts by `(px, 0)` and `(0, py)` nodes.
pub fn period_defect(ctx: &FlowContext, field: &TodaField, px: usize, py: usize) -> Result<PeriodReport> {
    if px > field.nx() || py > field.ny() || (px == 0 && py == 0) {
        return Err(Error::domain("periods must be positive and fit in the grid"));
    }
    let oz = field.omega_z.as_ref().ok_or_else(|| Error::Precondition("period check needs the stored Omega_z".into()))?;
    let ext = ctx.alg.rs.extended_simple_roots();
    let exps = |v: &CV| -> Vec<Complex64> { ext.iter().map(|r| root_eval(ctx, &r.coeffs, v).exp()).collect() };
    let mut rep = PeriodReport { omega_z: 0.0, exp_omega: 0.0 };
    for (sx, sy) in [(px, 0), (0, py)] {
        if sx + sy == 0 {
            continue;
        }
        for iy in 0..=field.ny() - sy {
            for ix in 0..=field.nx() - sx {
                rep.omega_z = rep.omega_z.max(sup_diff(oz.node(ix, iy), oz.node(ix + sx, iy + sy)));
                rep.exp_omega = rep.exp_omega.max(sup_diff(&exps(&field.at(ix, iy)), &exps(&field.at(ix + sx, iy + sy))));
            }
        }
    }
    Ok(rep)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormalizationReport {
    /// `c_0 prod_j c_j^{m_j}` per node (row-major), `None` where some `c_j` vanishes.
    pub values: Vec<Option<Complex64>>,
    /// `max |v - v_origin| / |v_origin|`.
    pub spread: f64,
    /// `|v_origin - r_0 prod r_j^{m_j}| / |r_0 prod r_j^{m_j}|`.
    pub equality_defect: f64,
    pub noncyclic_nodes: usize,
}

impl NormalizationReport {
    pub fn to_report(&self, h: f64) -> ResidualReport {
        let mut r = ResidualReport::new();
        r.push("normalization_spread", h, self.spread, Some(self.spread));
        r.push("normalization_equality", h, self.equality_defect, None);
        r
    }
}

/// Normalization invariant of per-node coefficients `c[node][j]` on the extended simple roots.
pub fn normalization_check(ctx: &FlowContext, data: &CyclicData, c: &[Vec<Complex64>]) -> Result<NormalizationReport> {
    let marks = ctx.alg.rs.extended_marks();
    if c.is_empty() {
        return Err(Error::domain("empty coefficient grid"));
    }
    let values: Vec<Option<Complex64>> = c
        .iter()
        .map(|cj| {
            let scale = cj.iter().map(|x| x.norm()).fold(0.0, f64::max);
            (scale > 0.0 && cj.iter().all(|x| x.norm() > DEFAULT_CYCLIC_TOLERANCE * scale)).then(|| normalization_product(cj, &marks))
        })
        .collect();
    let noncyclic_nodes = values.iter().filter(|v| v.is_none()).count();
    let reference = data.normalization_constant(&marks);
    let (spread, equality_defect) = match values[0] {
        Some(v0) => (
            values.iter().flatten().map(|v| (v - v0).norm()).fold(0.0, f64::max) / v0.norm(),
            (v0 - reference).norm() / reference.norm(),
        ),
        None => (f64::INFINITY, f64::INFINITY),
    };
    Ok(NormalizationReport { values, spread, equality_defect, noncyclic_nodes })
}

/// Extended simple root coefficients of `xi_d` at each node (row-major).
pub fn flow_coefficients(ctx: &FlowContext, grid: &FieldGrid) -> Result<Vec<Vec<Complex64>>> {
    let d = grid.d().ok_or_else(|| Error::Precondition("expected a loop grid".into()))? as i64;
    let basis = extended_simple_basis(&ctx.alg);
    Ok(interior(grid.nx, grid.ny, 0)
        .iter()
        .map(|&(ix, iy)| {
            let top = grid.loop_at(ix, iy).coeff(d).clone();
            basis.iter().map(|&i| top.coeffs[i]).collect()
        })
        .collect())
}

#[cfg(test)]
mod tests;
