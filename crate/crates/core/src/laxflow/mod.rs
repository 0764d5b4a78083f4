//! Commuting Lax flows on a finite-dimensional loop-algebra truncation and their
//! integration over a planar grid.
//!
//! With `A(xi) = lambda xi_d + r xi_{d-1}` and `F_z = [xi, A(xi)]`, the real vector
//! fields are `X = F_z + F_z^*` and `Y = i (F_z - F_z^*)`, where `^*` maps the
//! coefficient at `lambda^j` to the conjugate of the coefficient at `lambda^{-j}`.
//! Then `d xi/dx = X`, `d xi/dy = Y` and `d xi/dz = F_z` for real `xi`.

mod grid;
mod residual;

pub use grid::{FieldGrid, GridKind, GridMeta, MAGIC, VERSION};
pub use residual::{unit_circle_samples, adapted_check, conserved_drift, mc_residual, mc_residual_report, AdaptedReport, ResidualReport, ResidualRow};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chevalley::ChevalleyAlgebra;
use crate::coxeter::{extended_simple_basis, CoxeterAutomorphism, LoopElement};
use crate::element::{AlgebraElement, FloatElement};
use crate::error::{Error, Result};
use crate::involution::{reality_permutation, AntilinearConjugation, RealForm};
use crate::rootsystem::{NodePermutation, Series};

/// The multiplier `r` for the symmetric space `G/T`.
pub const R_HALF: f64 = 0.5;
pub const DEFAULT_BLOWUP_BOUND: f64 = 1e12;

/// Algebra, Coxeter automorphism and real form shared by all flow computations.
#[derive(Debug, Clone)]
pub struct FlowContext {
    pub alg: ChevalleyAlgebra,
    pub sigma: CoxeterAutomorphism,
    pub real_form: RealForm,
    /// `conj(alpha_j) = -alpha_{pi(j)}` on the extended simple roots.
    pub reality: NodePermutation,
}

impl FlowContext {
    pub fn new(series: Series, rank: usize, real_form: usize) -> Result<Self> {
        Self::from_algebra(ChevalleyAlgebra::from_type(series, rank)?, real_form)
    }

    pub fn from_algebra(alg: ChevalleyAlgebra, real_form: usize) -> Result<Self> {
        let sigma = CoxeterAutomorphism::new(&alg);
        let real_form = RealForm::new(&alg, real_form)?;
        let reality = reality_permutation(&alg, &real_form.conj)?;
        Ok(FlowContext { alg, sigma, real_form, reality })
    }

    pub fn conj(&self) -> &AntilinearConjugation {
        &self.real_form.conj
    }

    pub fn k(&self) -> usize {
        self.sigma.k
    }

    pub fn dim(&self) -> usize {
        self.alg.dim()
    }

    pub fn grid_meta(&self, h: f64) -> GridMeta {
        GridMeta {
            series: self.alg.rs.series,
            rank: self.alg.rank(),
            k: self.k(),
            dim: self.dim(),
            h,
            real_form: self.real_form.id,
        }
    }

    pub fn check_degree(&self, d: usize) -> Result<()> {
        if d % self.k() != 1 % self.k() {
            return Err(Error::domain(format!("degree {d} is not 1 mod k = {}", self.k())));
        }
        Ok(())
    }

    /// `(xi + xi^*) / 2`.
    pub fn realify(&self, xi: &LoopElement) -> LoopElement {
        let mut out = xi.clone();
        out.add_scaled(&xi.conj_dual(self.conj()), Complex64::new(1.0, 0.0));
        out.scale(Complex64::new(0.5, 0.0))
    }
}

/// `A(xi) = lambda xi_d + r xi_{d-1}` as a loop element of degree bound one.
pub fn lax_connection(xi: &LoopElement, r: f64) -> LoopElement {
    let d = xi.d() as i64;
    let mut a = LoopElement::zero(1, xi.dim());
    a.set(1, xi.coeff(d).clone());
    a.set(0, xi.coeff(d - 1).scale(&Complex64::new(r, 0.0)));
    a
}

/// `F_z = [xi, A(xi)]`, truncated to the degree bound of `xi` (the dropped coefficient is `[xi_d, xi_d] = 0`).
pub fn f_z(ctx: &FlowContext, xi: &LoopElement, r: f64) -> LoopElement {
    let full = LoopElement::bracket(&ctx.alg, xi, &lax_connection(xi, r));
    full.truncate(xi.d()).0
}

/// `(X(xi), Y(xi))` with multiplier `r` (the flows of the theory use `r = 1/2`).
pub fn lax_field_with_r(ctx: &FlowContext, xi: &LoopElement, r: f64) -> Result<(LoopElement, LoopElement)> {
    ctx.check_degree(xi.d())?;
    if xi.dim() != ctx.dim() {
        return Err(Error::DimensionMismatch { expected: ctx.dim(), got: xi.dim() });
    }
    Ok(fields_unchecked(ctx, xi, r))
}

pub fn lax_field(ctx: &FlowContext, xi: &LoopElement) -> Result<(LoopElement, LoopElement)> {
    lax_field_with_r(ctx, xi, R_HALF)
}

fn fields_unchecked(ctx: &FlowContext, xi: &LoopElement, r: f64) -> (LoopElement, LoopElement) {
    let fz = f_z(ctx, xi, r);
    let fzb = fz.conj_dual(ctx.conj());
    let mut x = fz.clone();
    x.add_scaled(&fzb, Complex64::new(1.0, 0.0));
    let i = Complex64::new(0.0, 1.0);
    let mut y = fz.scale(i);
    y.add_scaled(&fzb, -i);
    (x, y)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    X,
    Y,
}

fn field(ctx: &FlowContext, xi: &LoopElement, dir: Direction, r: f64) -> LoopElement {
    let (x, y) = fields_unchecked(ctx, xi, r);
    match dir {
        Direction::X => x,
        Direction::Y => y,
    }
}

/// One classical RK4 step of length `h`.
pub fn rk4_step(ctx: &FlowContext, xi: &LoopElement, h: f64, dir: Direction, r: f64) -> LoopElement {
    let c = |v: f64| Complex64::new(v, 0.0);
    let k1 = field(ctx, xi, dir, r);
    let mut t = xi.clone();
    t.add_scaled(&k1, c(0.5 * h));
    let k2 = field(ctx, &t, dir, r);
    let mut t = xi.clone();
    t.add_scaled(&k2, c(0.5 * h));
    let k3 = field(ctx, &t, dir, r);
    let mut t = xi.clone();
    t.add_scaled(&k3, c(h));
    let k4 = field(ctx, &t, dir, r);
    let mut out = xi.clone();
    out.add_scaled(&k1, c(h / 6.0));
    out.add_scaled(&k2, c(h / 3.0));
    out.add_scaled(&k3, c(h / 3.0));
    out.add_scaled(&k4, c(h / 6.0));
    out
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FlowSpec {
    pub d: usize,
    pub xi0: LoopElement,
    pub lx: f64,
    pub ly: f64,
    pub h: f64,
    pub blowup_bound: f64,
    /// Multiplier in `A(xi)`; anything other than `1/2` is a deliberate perturbation.
    pub r: f64,
}

impl FlowSpec {
    pub fn new(xi0: LoopElement, lx: f64, ly: f64, h: f64) -> Self {
        FlowSpec { d: xi0.d(), xi0, lx, ly, h, blowup_bound: DEFAULT_BLOWUP_BOUND, r: R_HALF }
    }

    fn steps(extent: f64, h: f64) -> Result<usize> {
        let n = (extent / h).round();
        if !(n >= 0.0) || (n * h - extent).abs() > 1e-9 * extent.max(h) {
            return Err(Error::domain(format!("extent {extent} is not a multiple of h = {h}")));
        }
        Ok(n as usize)
    }

    pub fn nx(&self) -> Result<usize> {
        Self::steps(self.lx, self.h)
    }

    pub fn ny(&self) -> Result<usize> {
        Self::steps(self.ly, self.h)
    }

    pub fn validate(&self, ctx: &FlowContext) -> Result<()> {
        ctx.check_degree(self.d)?;
        if self.xi0.d() != self.d || self.xi0.dim() != ctx.dim() {
            return Err(Error::domain("initial loop element has the wrong shape"));
        }
        if !(self.h > 0.0) || !(self.lx >= 0.0) || !(self.ly >= 0.0) || !(self.blowup_bound >= 0.0) {
            return Err(Error::domain("step, extents and blow-up bound must be nonnegative (h positive)"));
        }
        self.nx()?;
        self.ny()?;
        let scale = self.xi0.max_abs().max(1.0);
        if self.xi0.grading_defect(&ctx.sigma) > 1e-12 * scale {
            return Err(Error::domain("initial loop element violates the grading"));
        }
        if self.xi0.reality_defect(ctx.conj()) > 1e-12 * scale {
            return Err(Error::domain("initial loop element violates the reality condition"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlowUp {
    pub ix: usize,
    pub iy: usize,
    pub norm: f64,
}

#[derive(Debug, Clone)]
pub struct FlowOutcome {
    pub grid: FieldGrid,
    pub blowup: Option<BlowUp>,
    /// Largest off-grading coefficient removed by re-projection.
    pub projection_defect: f64,
    pub reality_defect: f64,
}

/// Connection coefficients stored per node: `A_z` at degrees 0, 1, then `A_zbar` at degrees -1, 0.
pub fn connection_coefficients(ctx: &FlowContext, xi: &LoopElement, r: f64) -> Vec<Complex64> {
    let d = xi.d() as i64;
    let rc = Complex64::new(r, 0.0);
    let mut out = Vec::with_capacity(4 * ctx.dim());
    out.extend(xi.coeff(d - 1).scale(&rc).coeffs);
    out.extend(xi.coeff(d).coeffs.iter().copied());
    out.extend(xi.coeff(-d).coeffs.iter().copied());
    out.extend(ctx.conj().apply(xi.coeff(d - 1)).scale(&rc).coeffs);
    out
}

fn advance(ctx: &FlowContext, xi: &LoopElement, h: f64, dir: Direction, r: f64) -> (LoopElement, f64) {
    let next = rk4_step(ctx, xi, h, dir, r);
    let defect = next.grading_defect(&ctx.sigma);
    (next.project_grading(&ctx.sigma), defect)
}

/// RK4 along `x` from the origin, then along `y` up each column.
pub fn integrate_flow(ctx: &FlowContext, spec: &FlowSpec) -> Result<FlowOutcome> {
    spec.validate(ctx)?;
    let (nx, ny) = (spec.nx()?, spec.ny()?);
    let norm0 = spec.xi0.max_abs();
    if !(norm0 <= spec.blowup_bound) {
        let grid = FieldGrid::new(GridKind::Loop { d: spec.d }, ctx.grid_meta(spec.h), 0, 0);
        return Ok(FlowOutcome { grid, blowup: Some(BlowUp { ix: 0, iy: 0, norm: norm0 }), projection_defect: 0.0, reality_defect: 0.0 });
    }

    let mut row = vec![spec.xi0.clone()];
    let mut proj: f64 = 0.0;
    let mut blowup = None;
    for ix in 1..=nx {
        let (next, defect) = advance(ctx, &row[ix - 1], spec.h, Direction::X, spec.r);
        proj = proj.max(defect);
        let norm = next.max_abs();
        if !(norm <= spec.blowup_bound) {
            blowup = Some(BlowUp { ix, iy: 0, norm });
            break;
        }
        row.push(next);
    }
    let nx_ok = row.len() - 1;

    let columns: Vec<(Vec<LoopElement>, f64, Option<BlowUp>)> = row
        .into_par_iter()
        .enumerate()
        .map(|(ix, start)| {
            let mut col = vec![start];
            let mut proj: f64 = 0.0;
            for iy in 1..=ny {
                let (next, defect) = advance(ctx, &col[iy - 1], spec.h, Direction::Y, spec.r);
                proj = proj.max(defect);
                let norm = next.max_abs();
                if !(norm <= spec.blowup_bound) {
                    return (col, proj, Some(BlowUp { ix, iy, norm }));
                }
                col.push(next);
            }
            (col, proj, None)
        })
        .collect();

    let ny_ok = columns.iter().map(|c| c.0.len() - 1).min().unwrap_or(0);
    if blowup.is_none() {
        blowup = columns.iter().filter_map(|c| c.2).min_by_key(|b| (b.iy, b.ix));
    }
    let mut out = FieldGrid::new(GridKind::Loop { d: spec.d }, ctx.grid_meta(spec.h), nx_ok, ny_ok);
    let mut connection = Vec::with_capacity(4 * ctx.dim() * (nx_ok + 1) * (ny_ok + 1));
    let mut reality: f64 = 0.0;
    for iy in 0..=ny_ok {
        for (ix, col) in columns.iter().enumerate() {
            let xi = &col.0[iy];
            out.set_loop(ix, iy, xi);
            connection.extend(connection_coefficients(ctx, xi, spec.r));
            reality = reality.max(xi.reality_defect(ctx.conj()));
        }
    }
    for c in &columns {
        proj = proj.max(c.1);
    }
    out.set_connection(connection)?;
    Ok(FlowOutcome { grid: out, blowup, projection_defect: proj, reality_defect: reality })
}

/// Integrates `steps` RK4 steps in one direction.
pub fn flow_line(ctx: &FlowContext, xi: &LoopElement, h: f64, steps: usize, dir: Direction, r: f64) -> LoopElement {
    let mut x = xi.clone();
    for _ in 0..steps {
        x = advance(ctx, &x, h, dir, r).0;
    }
    x
}

/// `|| phi_y(phi_x(xi0)) - phi_x(phi_y(xi0)) ||` at the probe point `(px, py)`.
pub fn commutation_defect(ctx: &FlowContext, spec: &FlowSpec, px: f64, py: f64) -> Result<f64> {
    spec.validate(ctx)?;
    let sx = FlowSpec::steps(px, spec.h)?;
    let sy = FlowSpec::steps(py, spec.h)?;
    let xy = flow_line(ctx, &flow_line(ctx, &spec.xi0, spec.h, sx, Direction::X, spec.r), spec.h, sy, Direction::Y, spec.r);
    let yx = flow_line(ctx, &flow_line(ctx, &spec.xi0, spec.h, sy, Direction::Y, spec.r), spec.h, sx, Direction::X, spec.r);
    Ok(xy.distance(&yx))
}

/// `W = sum_j r_j R_{alpha_j}` over the extended simple roots (`r[0]` on the lowest root).
pub fn cyclic_element(alg: &ChevalleyAlgebra, r: &[Complex64]) -> Result<FloatElement> {
    let basis = extended_simple_basis(alg);
    if r.len() != basis.len() {
        return Err(Error::DimensionMismatch { expected: basis.len(), got: r.len() });
    }
    let mut w = alg.zero();
    for (&i, &c) in basis.iter().zip(r) {
        w.coeffs[i] = c;
    }
    Ok(w)
}

/// Coefficients `r_j` with `[W, conj W] = 0`.
///
/// Writing `conj(R_{alpha_j}) = s_j R_{-alpha_{pi(j)}}`, the bracket is
/// `sum_j r_j conj(r_{pi(j)}) s_{pi(j)} H_{alpha_j}`, which vanishes when
/// `r_j conj(r_{pi(j)}) s_{pi(j)} = c m_j (alpha_j, alpha_j) / (alpha_0, alpha_0)`
/// for a common real `c`, because `sum_j m_j alpha_j^# = 0`.
pub fn vacuum_coefficients(ctx: &FlowContext) -> Result<Vec<Complex64>> {
    let rs = &ctx.alg.rs;
    let ext = rs.extended_simple_roots();
    let marks = rs.extended_marks();
    let len0 = rs.inner(&ext[0].coeffs, &ext[0].coeffs) as f64;
    let mu: Vec<f64> = (0..ext.len()).map(|j| marks[j] as f64 * rs.inner(&ext[j].coeffs, &ext[j].coeffs) as f64 / len0).collect();
    let s = conj_signs(ctx);
    let pi = &ctx.reality;
    let c = (0..ext.len()).find(|&j| pi.apply(j) == j).map_or(1.0, |j| s[j] as f64);
    let mut r = vec![Complex64::new(0.0, 0.0); ext.len()];
    for j in 0..ext.len() {
        let l = pi.apply(j);
        if l == j {
            if s[j] as f64 != c {
                return Err(Error::Construction("no vacuum normalization for this real form".into()));
            }
            r[j] = Complex64::new(mu[j].sqrt(), 0.0);
        } else if j < l {
            if s[j] != s[l] {
                return Err(Error::Construction("no vacuum normalization for this real form".into()));
            }
            r[j] = Complex64::new(mu[j].sqrt(), 0.0);
            r[l] = Complex64::new(c * s[l] as f64 * mu[j].sqrt(), 0.0);
        }
    }
    Ok(r)
}

/// Signs `s_j` with `conj(R_{alpha_j}) = s_j R_{-alpha_{pi(j)}}`.
pub fn conj_signs(ctx: &FlowContext) -> Vec<i64> {
    let rs = &ctx.alg.rs;
    rs.extended_simple_roots()
        .iter()
        .map(|root| ctx.conj().linear.roots[rs.root_index(&root.coeffs).unwrap()].1)
        .collect()
}

/// `xi = lambda^d W + lambda^{-d} conj(W)`, a stationary point of both flows when `[W, conj W] = 0`.
pub fn vacuum_loop(ctx: &FlowContext, d: usize) -> Result<LoopElement> {
    ctx.check_degree(d)?;
    let w = cyclic_element(&ctx.alg, &vacuum_coefficients(ctx)?)?;
    let mut xi = LoopElement::zero(d, ctx.dim());
    xi.set(-(d as i64), ctx.conj().apply(&w));
    xi.set(d as i64, w);
    Ok(xi)
}

/// Random real graded loop element with Gaussian coefficients of standard deviation `amplitude`.
pub fn random_real_loop(ctx: &FlowContext, d: usize, amplitude: f64, seed: u64) -> Result<LoopElement> {
    ctx.check_degree(d)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut xi = LoopElement::zero(d, ctx.dim());
    for j in 0..=d as i64 {
        let mut x: FloatElement = AlgebraElement::zero(ctx.dim());
        for i in ctx.sigma.graded_basis(j) {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            x.coeffs[i] = Complex64::new(re, im) * amplitude;
        }
        if j == 0 {
            let mut real = x.clone();
            real += &ctx.conj().apply(&x);
            xi.set(0, real.scale(&Complex64::new(0.5, 0.0)));
        } else {
            xi.set(-j, ctx.conj().apply(&x));
            xi.set(j, x);
        }
    }
    Ok(xi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coxeter::is_cyclic;

    fn a2() -> FlowContext {
        FlowContext::new(Series::A, 2, 0).unwrap()
    }

    #[test]
    fn vacuum_bracket_vanishes() {
        let ctx = a2();
        let w = cyclic_element(&ctx.alg, &vacuum_coefficients(&ctx).unwrap()).unwrap();
        assert!(ctx.alg.bracket(&w, &ctx.conj().apply(&w)).max_abs() < 1e-15);
        let xi = vacuum_loop(&ctx, 1).unwrap();
        let (x, y) = lax_field(&ctx, &xi).unwrap();
        assert!(x.max_abs() < 1e-15 && y.max_abs() < 1e-15);
    }

    #[test]
    fn vacuum_for_every_real_form_small_types() {
        for (s, n) in [(Series::A, 2), (Series::A, 3), (Series::B, 2), (Series::G, 2), (Series::D, 4)] {
            let alg = ChevalleyAlgebra::from_type(s, n).unwrap();
            let count = crate::involution::DiagramInvolution::all(&alg.rs).len();
            for id in 0..count {
                let ctx = FlowContext::from_algebra(alg.clone(), id).unwrap();
                if let Ok(r) = vacuum_coefficients(&ctx) {
                    let w = cyclic_element(&ctx.alg, &r).unwrap();
                    assert!(ctx.alg.bracket(&w, &ctx.conj().apply(&w)).max_abs() < 1e-12, "{s}{n} form {id}");
                    assert!(is_cyclic(&ctx.alg, &ctx.sigma, &w, 1e-12).unwrap());
                }
            }
        }
    }

    #[test]
    fn degree_must_be_one_mod_k() {
        let ctx = a2();
        let xi = LoopElement::zero(2, ctx.dim());
        assert!(matches!(lax_field(&ctx, &xi), Err(Error::Domain(_))));
    }

    #[test]
    fn zero_top_coefficient_gives_zero_top_field() {
        let ctx = a2();
        let mut xi = random_real_loop(&ctx, 4, 1.0, 3).unwrap();
        xi.set(4, ctx.alg.zero());
        xi.set(-4, ctx.alg.zero());
        let (x, y) = lax_field(&ctx, &xi).unwrap();
        assert!(x.coeff(4).max_abs() < 1e-15 && y.coeff(4).max_abs() < 1e-15);
    }

    #[test]
    fn fields_are_real_and_graded() {
        let ctx = a2();
        for seed in 0..5 {
            let xi = random_real_loop(&ctx, 4, 1.0, seed).unwrap();
            assert!(xi.reality_defect(ctx.conj()) < 1e-15);
            let (x, y) = lax_field(&ctx, &xi).unwrap();
            assert!(x.reality_defect(ctx.conj()) < 1e-12);
            assert!(y.reality_defect(ctx.conj()) < 1e-12);
            assert!(x.grading_defect(&ctx.sigma) < 1e-15);
            assert!(y.grading_defect(&ctx.sigma) < 1e-15);
        }
    }

    #[test]
    fn x_field_vanishes_for_degree_one() {
        // For d = 1 the coefficients of F_z and F_z^* cancel pairwise in X.
        let ctx = a2();
        for seed in 0..5 {
            let xi = random_real_loop(&ctx, 1, 1.0, seed).unwrap();
            let (x, y) = lax_field(&ctx, &xi).unwrap();
            assert!(x.max_abs() < 1e-14);
            assert!(y.max_abs() > 1e-3);
        }
    }

    #[test]
    fn blowup_bound_below_initial_norm_truncates() {
        let ctx = a2();
        let xi = random_real_loop(&ctx, 1, 1.0, 1).unwrap();
        let mut spec = FlowSpec::new(xi, 0.1, 0.1, 0.01);
        spec.blowup_bound = 0.0;
        let out = integrate_flow(&ctx, &spec).unwrap();
        assert_eq!(out.blowup.unwrap().ix, 0);
        assert_eq!((out.grid.nx, out.grid.ny), (0, 0));
    }

    #[test]
    fn vacuum_grid_is_constant() {
        let ctx = a2();
        let xi = vacuum_loop(&ctx, 1).unwrap();
        let out = integrate_flow(&ctx, &FlowSpec::new(xi.clone(), 0.2, 0.2, 0.02)).unwrap();
        for iy in 0..=out.grid.ny {
            for ix in 0..=out.grid.nx {
                assert!(out.grid.loop_at(ix, iy).distance(&xi) < 1e-12);
            }
        }
    }

    #[test]
    fn invalid_specs_rejected() {
        let ctx = a2();
        let xi = random_real_loop(&ctx, 1, 1.0, 1).unwrap();
        let mut spec = FlowSpec::new(xi.clone(), 0.105, 0.1, 0.01);
        assert!(integrate_flow(&ctx, &spec).is_err());
        spec.lx = 0.1;
        let mut broken = xi.clone();
        broken.coeff_mut(1).coeffs[0] = Complex64::new(1.0, 0.0);
        spec.xi0 = broken;
        assert!(integrate_flow(&ctx, &spec).is_err());
    }
}
