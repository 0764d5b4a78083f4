//! The gauge recursion producing a formal Killing field `Y = (1+X)^{-1} Ad_{exp Omega} W (1+X)`,
//! Jacobi-field residuals and the shifted fields `Y^l`.
//!
//! All products are taken in the adjoint representation `g -> gl(m)`, `m = dim g`. With
//! `P = Ad_{exp Omega}` (diagonal in the Chevalley basis), `ad_{Ad_{exp Omega} W}` on `gl(m)` is the
//! conjugate by `P` of `ad_W`, so the splitting `gl(m) = ker + im` is computed once for `W`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;

use super::{twisted_w, CyclicData, TodaField};
use crate::coxeter::{grade_component, LoopElement};
use crate::element::FloatElement;
use crate::error::{Error, Result};
use crate::fd;
use crate::laxflow::{FieldGrid, FlowContext, GridKind, ResidualReport};
use crate::rootsystem::CartanVector;

type CM = DMatrix<Complex64>;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// `gl(m) = V + V^perp` for `V = ker ad_A`, `V^perp = im ad_A`, `A = ad W`, in column-major
/// vectorized coordinates, plus the trace-form projection `gl(m) -> ad(g)`.
#[derive(Debug, Clone)]
pub struct GlSplitting {
    pub m: usize,
    pub kernel_dim: usize,
    proj_v: CM,
    solve: CM,
    to_g: CM,
}

impl GlSplitting {
    pub fn new(ctx: &FlowContext, w: &FloatElement) -> Result<Self> {
        let m = ctx.dim();
        if m > 64 {
            return Err(Error::domain(format!("adjoint dimension {m} too large for the gl(m) splitting")));
        }
        let a: CM = ctx.alg.adjoint_matrix(w);
        let id = CM::identity(m, m);
        let op = id.kronecker(&a) - a.transpose().kronecker(&id);
        let svd = op.clone().svd(true, true);
        let (u, vt) = (svd.u.as_ref().unwrap(), svd.v_t.as_ref().unwrap());
        let smax = svd.singular_values.max();
        let tol = 1e-9 * smax;
        let kernel: Vec<usize> = (0..m * m).filter(|&i| svd.singular_values[i] <= tol).collect();
        let image: Vec<usize> = (0..m * m).filter(|&i| svd.singular_values[i] > tol).collect();
        let mut basis = CM::zeros(m * m, m * m);
        for (col, &i) in kernel.iter().enumerate() {
            basis.set_column(col, &vt.row(i).adjoint());
        }
        for (col, &i) in image.iter().enumerate() {
            basis.set_column(kernel.len() + col, &u.column(i));
        }
        let bs = basis.clone().svd(false, false).singular_values;
        if bs.min() < 1e-9 * bs.max() {
            return Err(Error::Construction("ker ad_W and im ad_W intersect: W is not semisimple".into()));
        }
        let inv = basis.clone().try_inverse().ok_or_else(|| Error::Construction("singular splitting basis".into()))?;
        let kd = kernel.len();
        let proj_v = basis.columns(0, kd) * inv.rows(0, kd);
        let proj_perp = basis.columns(kd, m * m - kd) * inv.rows(kd, m * m - kd);
        let img = basis.columns(kd, m * m - kd).into_owned();
        let pinv = (&op * &img).pseudo_inverse(1e-12).map_err(|e| Error::Construction(e.to_string()))?;
        let solve = &img * pinv * proj_perp;

        let dim = m;
        let mut t = CM::zeros(dim, m * m);
        let mut kill = CM::zeros(dim, dim);
        for i in 0..dim {
            let e: FloatElement = ctx.alg.basis_element(i);
            let ad = ctx.alg.adjoint_matrix(&e);
            for k in 0..m {
                for l in 0..m {
                    t[(i, l + k * m)] = ad[(k, l)];
                }
            }
            for j in 0..dim {
                kill[(i, j)] = c(ctx.alg.killing_basis(i, j) as f64);
            }
        }
        let to_g = kill.try_inverse().ok_or_else(|| Error::Construction("degenerate Killing form".into()))? * t;
        Ok(GlSplitting { m, kernel_dim: kd, proj_v, solve, to_g })
    }

    fn apply(&self, op: &CM, x: &CM, p: &[Complex64]) -> CM {
        let m = self.m;
        let r = CM::from_fn(m, m, |i, j| x[(i, j)] * p[j] / p[i]);
        let v = op * DVector::from_column_slice(r.as_slice());
        CM::from_fn(m, m, |i, j| v[i + j * m] * p[i] / p[j])
    }

    /// Component in `V` at a node with `P = diag(p)`.
    pub fn project_v(&self, x: &CM, p: &[Complex64]) -> CM {
        self.apply(&self.proj_v, x, p)
    }

    /// The solution in `V^perp` of `[Ad_{exp Omega} W, X] = r^perp`.
    pub fn solve(&self, r: &CM, p: &[Complex64]) -> CM {
        self.apply(&self.solve, r, p)
    }

    /// Trace-form projection onto `ad(g)`, returned as an element of `g`.
    pub fn to_algebra(&self, x: &CM) -> FloatElement {
        FloatElement::from_coeffs((&self.to_g * DVector::from_column_slice(x.as_slice())).iter().copied().collect())
    }
}

/// Result of [`formal_killing_recursion`]. Per-node vectors are row-major; entries are `None`
/// outside the region where the finite differences are available or at flagged nodes.
#[derive(Debug, Clone)]
pub struct RecursionResult {
    pub order: usize,
    pub nx: usize,
    pub ny: usize,
    pub h: f64,
    /// `x[n - 1][node] = X_{-n}` in `gl(m)`.
    pub x: Vec<Vec<Option<CM>>>,
    /// `pi^sigma(lambda pi(Y))` with degrees `1 - order ..= 1`, stored with degree bound `order`.
    pub xi_tilde: Vec<Option<LoopElement>>,
    pub flagged: Vec<(usize, usize)>,
    pub report: ResidualReport,
}

impl RecursionResult {
    pub fn lowest_degree(&self) -> i64 {
        1 - self.order as i64
    }

    pub fn xi_at(&self, ix: usize, iy: usize) -> Option<&LoopElement> {
        self.xi_tilde[iy * (self.nx + 1) + ix].as_ref()
    }
}

fn neighbours(ix: usize, iy: usize, nx: usize, ny: usize) -> Option<[(usize, usize); 4]> {
    (ix >= 2 && iy >= 2 && ix + 2 <= nx && iy + 2 <= ny).then(|| [(ix - 2, iy), (ix - 1, iy), (ix + 1, iy), (ix + 2, iy)])
}

/// `(d/dz, d/dzbar)` of a vector field sampled at `(ix, iy)` neighbours, if all are present.
fn wirtinger_at<'a, F>(get: F, ix: usize, iy: usize, nx: usize, ny: usize, h: f64) -> Option<(Vec<Complex64>, Vec<Complex64>)>
where
    F: Fn(usize, usize) -> Option<&'a [Complex64]>,
{
    neighbours(ix, iy, nx, ny)?;
    let dx = fd::central4(get(ix - 2, iy)?, get(ix - 1, iy)?, get(ix + 1, iy)?, get(ix + 2, iy)?, h);
    let dy = fd::central4(get(ix, iy - 2)?, get(ix, iy - 1)?, get(ix, iy + 1)?, get(ix, iy + 2)?, h);
    Some(fd::wirtinger(&dx, &dy))
}

struct NodeData {
    oz: CartanVector<Complex64>,
    ozb: CartanVector<Complex64>,
    w: FloatElement,
    wbar: FloatElement,
    p: Vec<Complex64>,
    ad_oz: Vec<Complex64>,
}

fn weights(ctx: &FlowContext, v: &CartanVector<Complex64>) -> Vec<Complex64> {
    let n = ctx.alg.rank();
    (0..ctx.dim())
        .map(|i| match ctx.alg.root_of(i) {
            None => c(0.0),
            Some(a) => (0..n).map(|l| v.0[l] * ctx.alg.root_value(a, l) as f64).sum(),
        })
        .collect()
}

fn diag_right(x: &CM, d: &[Complex64]) -> CM {
    CM::from_fn(x.nrows(), x.ncols(), |i, j| x[(i, j)] * d[j])
}

fn diag_commutator(d: &[Complex64], x: &CM) -> CM {
    CM::from_fn(x.nrows(), x.ncols(), |i, j| (d[i] - d[j]) * x[(i, j)])
}

fn sup_matrix(x: &CM) -> f64 {
    x.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// Solves the gauge recursion for `X_{-1}, ..., X_{-order}` and reports the Lax residual of
/// `xi~ = pi^sigma(lambda pi(Y))` against `phi = (Omega_z + lambda Ad_{exp Omega} W) dz +
/// (-Omega_zbar + lambda^{-1} Ad_{exp -Omega} conj W) dzbar`.
///
/// Report rows: `lax_deg<j>` per degree, `lax_nonneg` (degrees `>= 0`), `lax_all`,
/// `v_defect` (the `V`-part of each right-hand side, zero in exact arithmetic) and
/// `top_vs_adw` (`|xi~_1 - Ad_{exp Omega} W|`).
pub fn formal_killing_recursion(ctx: &FlowContext, field: &TodaField, data: &CyclicData, order: usize) -> Result<RecursionResult> {
    if order == 0 {
        return Err(Error::domain("recursion order must be at least 1"));
    }
    let (nx, ny, h) = (field.nx(), field.ny(), field.h());
    let w = nx + 1;
    let count = w * (ny + 1);
    let all_nodes: Vec<(usize, usize)> = (0..=ny).flat_map(|iy| (0..=nx).map(move |ix| (ix, iy))).collect();
    let mut report = ResidualReport::new();

    let split = match GlSplitting::new(ctx, &data.w) {
        Ok(s) => s,
        Err(_) => {
            report.push("flagged", h, count as f64, None);
            return Ok(RecursionResult { order, nx, ny, h, x: vec![vec![None; count]; order], xi_tilde: vec![None; count], flagged: all_nodes, report });
        }
    };
    let generic_rank = ctx.dim() - ctx.alg.rank();
    let dm = field.derivative_margin();

    let nodes: Vec<Option<NodeData>> = all_nodes
        .par_iter()
        .map(|&(ix, iy)| {
            if ix < dm || iy < dm || ix + dm > nx || iy + dm > ny {
                return None;
            }
            let omega = field.at(ix, iy);
            let (oz, ozb) = field.derivatives(ctx, ix, iy);
            let (wt, wb) = twisted_w(ctx, data, &omega);
            let ad = ctx.alg.adjoint_matrix(&wt);
            let sv = ad.svd(false, false).singular_values;
            let rank = sv.iter().filter(|&&s| s > 1e-9 * sv.max()).count();
            if rank < generic_rank {
                return None;
            }
            let p = weights(ctx, &omega).into_iter().map(|z| z.exp()).collect();
            let ad_oz = weights(ctx, &oz);
            Some(NodeData { oz, ozb, w: wt, wbar: wb, p, ad_oz })
        })
        .collect();
    let flagged: Vec<(usize, usize)> =
        all_nodes.iter().zip(&nodes).filter(|((ix, iy), n)| n.is_none() && *ix >= dm && *iy >= dm && ix + dm <= nx && iy + dm <= ny).map(|(p, _)| *p).collect();

    // X_{-1} = ad^{-1}(2 Omega_z)
    let first: Vec<Option<CM>> = nodes
        .par_iter()
        .map(|nd| {
            let nd = nd.as_ref()?;
            let rhs = CM::from_diagonal(&DVector::from_iterator(nd.ad_oz.len(), nd.ad_oz.iter().map(|z| 2.0 * z)));
            Some(split.solve(&rhs, &nd.p))
        })
        .collect();
    let mut xs: Vec<Vec<Option<CM>>> = vec![first];
    let mut v_defect: f64 = 0.0;
    for n in 1..order {
        let prev = &xs[n - 1];
        let results: Vec<Option<(CM, f64)>> = all_nodes
            .par_iter()
            .enumerate()
            .map(|(idx, &(ix, iy))| {
                let nd = nodes[idx].as_ref()?;
                let x = prev[idx].as_ref()?;
                let get = |i: usize, j: usize| prev[j * w + i].as_ref().map(|m| m.as_slice());
                let (xz, _) = wirtinger_at(get, ix, iy, nx, ny, h)?;
                let m = split.m;
                let xz = CM::from_column_slice(m, m, &xz);
                let dprime = xz - diag_commutator(&nd.ad_oz, x);
                let xo = diag_right(x, &nd.ad_oz);
                let mut rhs = (&xo - split.project_v(&xo, &nd.p)) * c(2.0) - dprime;
                for s in 1..n {
                    let (xs_, xl) = (xs[s - 1][idx].as_ref()?, xs[n - s - 1][idx].as_ref()?);
                    rhs -= split.project_v(&diag_right(xs_, &nd.ad_oz), &nd.p) * xl * c(2.0);
                }
                let vd = sup_matrix(&split.project_v(&rhs, &nd.p));
                Some((split.solve(&rhs, &nd.p), vd))
            })
            .collect();
        let mut level = Vec::with_capacity(count);
        for r in results {
            match r {
                Some((x, vd)) => {
                    v_defect = v_defect.max(vd);
                    level.push(Some(x));
                }
                None => level.push(None),
            }
        }
        xs.push(level);
    }

    // Y = (1+X)^{-1} W~ (1+X), truncated at lambda^{-order}
    let m = split.m;
    let xi_tilde: Vec<Option<LoopElement>> = (0..count)
        .into_par_iter()
        .map(|idx| {
            let nd = nodes[idx].as_ref()?;
            let xk: Vec<&CM> = (0..order).map(|n| xs[n][idx].as_ref()).collect::<Option<_>>()?;
            let id = CM::identity(m, m);
            let mut q = vec![id.clone()];
            for n in 1..=order {
                let mut acc = CM::zeros(m, m);
                for s in 1..=n {
                    acc -= xk[s - 1] * &q[n - s];
                }
                q.push(acc);
            }
            let wt = ctx.alg.adjoint_matrix(&nd.w);
            let xhat = |b: usize| if b == 0 { id.clone() } else { xk[b - 1].clone() };
            let mut xi = LoopElement::zero(order, ctx.dim());
            for n in 0..=order {
                let mut y = CM::zeros(m, m);
                for a in 0..=n {
                    y += &q[a] * &wt * xhat(n - a);
                }
                let deg = 1 - n as i64;
                xi.set(deg, grade_component(&ctx.sigma, &split.to_algebra(&y), deg));
            }
            Some(xi)
        })
        .collect();

    let top = (0..count)
        .filter_map(|idx| Some(xi_tilde[idx].as_ref()?.coeff(1).distance(&nodes[idx].as_ref()?.w)))
        .fold(0.0, f64::max);

    let lowest = 1 - order as i64;
    let degs: Vec<i64> = (lowest..=1).collect();
    let flats: Vec<Vec<Option<Vec<Complex64>>>> =
        degs.iter().map(|&j| xi_tilde.iter().map(|x| x.as_ref().map(|x| x.coeff(j).coeffs.clone())).collect()).collect();
    let per_degree: Vec<f64> = all_nodes
        .par_iter()
        .enumerate()
        .map(|(idx, &(ix, iy))| {
            let mut sup = vec![0.0; degs.len()];
            let (Some(nd), Some(xi)) = (nodes[idx].as_ref(), xi_tilde[idx].as_ref()) else { return sup };
            let oz = super::cartan_element(ctx, &nd.oz);
            let ozb = super::cartan_element(ctx, &nd.ozb);
            for (t, &j) in degs.iter().enumerate() {
                let get = |i: usize, k: usize| flats[t][k * w + i].as_deref();
                let Some((dz, dzb)) = wirtinger_at(get, ix, iy, nx, ny, h) else { return vec![0.0; degs.len()] };
                let xj = xi.coeff(j);
                if j > lowest {
                    let mut r = FloatElement::from_coeffs(dz);
                    r -= &ctx.alg.bracket(xj, &oz);
                    r -= &ctx.alg.bracket(xi.coeff(j - 1), &nd.w);
                    sup[t] = f64::max(sup[t], r.max_abs());
                }
                let mut r = FloatElement::from_coeffs(dzb);
                r += &ctx.alg.bracket(xj, &ozb);
                if j < 1 {
                    r -= &ctx.alg.bracket(xi.coeff(j + 1), &nd.wbar);
                }
                sup[t] = f64::max(sup[t], r.max_abs());
            }
            sup
        })
        .reduce(|| vec![0.0; degs.len()], |a, b| a.iter().zip(&b).map(|(x, y)| x.max(*y)).collect());

    for (t, &j) in degs.iter().enumerate() {
        report.push(&format!("lax_deg{j}"), h, per_degree[t], None);
    }
    let nonneg = degs.iter().zip(&per_degree).filter(|(j, _)| **j >= 0).map(|(_, v)| *v).fold(0.0, f64::max);
    report.push("lax_nonneg", h, nonneg, None);
    report.push("lax_all", h, per_degree.iter().copied().fold(0.0, f64::max), None);
    report.push("v_defect", h, v_defect, None);
    report.push("top_vs_adw", h, top, None);
    report.push("flagged", h, flagged.len() as f64, None);
    Ok(RecursionResult { order, nx, ny, h, x: xs, xi_tilde, flagged, report })
}

/// `Y^l = Y_{-kl} / 2 + sum_{-kl < j <= 1} lambda^{j + kl} Y_j` and `Omega_dot^l = Y_{-kl} / 2`.
pub fn build_yl(y: &LoopElement, lowest_degree: i64, k: usize, l: usize) -> Result<(LoopElement, FloatElement)> {
    if l == 0 {
        return Err(Error::domain("l must be positive"));
    }
    let kl = (k * l) as i64;
    if -kl < lowest_degree || -kl < -(y.d() as i64) {
        return Err(Error::domain(format!("Y^{l} needs coefficients down to degree {}", -kl)));
    }
    let half = c(0.5);
    let omega_dot = y.coeff(-kl).scale(&half);
    let mut out = LoopElement::zero(kl as usize + 1, y.dim());
    out.set(0, omega_dot.clone());
    for j in (1 - kl)..=1 {
        out.set(j + kl, y.coeff(j).clone());
    }
    Ok((out, omega_dot))
}

/// [`build_yl`] at every node carrying `xi~`; other nodes are left zero.
pub fn build_yl_grid(ctx: &FlowContext, rec: &RecursionResult, l: usize) -> Result<(FieldGrid, FieldGrid)> {
    let d = ctx.k() * l + 1;
    let meta = ctx.grid_meta(rec.h);
    let mut yg = FieldGrid::new(GridKind::Loop { d }, meta, rec.nx, rec.ny);
    let mut og = FieldGrid::new(GridKind::Cartan, meta, rec.nx, rec.ny);
    let n = ctx.alg.rank();
    for iy in 0..=rec.ny {
        for ix in 0..=rec.nx {
            if let Some(xi) = rec.xi_at(ix, iy) {
                let (y, od) = build_yl(xi, rec.lowest_degree(), ctx.k(), l)?;
                yg.set_loop(ix, iy, &y);
                og.set_cartan(ix, iy, &CartanVector(od.coeffs[..n].to_vec()));
            }
        }
    }
    Ok((yg, og))
}

/// Residuals of the two Jacobi equations at each `lambda` sample (rows `jacobi1`, `jacobi2`) and of
/// the eliminated elliptic equation for `Omega_dot` (`jacobi_elliptic`), over nodes at least
/// `margin + 2` from the boundary.
pub fn jacobi_residual(
    ctx: &FlowContext,
    y: &FieldGrid,
    omega_dot: &FieldGrid,
    field: &TodaField,
    data: &CyclicData,
    lambdas: &[Complex64],
    margin: usize,
) -> Result<ResidualReport> {
    if y.d().is_none() || omega_dot.kind != GridKind::Cartan {
        return Err(Error::Precondition("expected a loop grid and a Cartan grid".into()));
    }
    if (y.nx, y.ny) != (field.nx(), field.ny()) || (omega_dot.nx, omega_dot.ny) != (field.nx(), field.ny()) {
        return Err(Error::Precondition("grid shapes differ".into()));
    }
    let (nx, ny, h) = (field.nx(), field.ny(), field.h());
    let mg = margin.max(field.derivative_margin()) + 2;
    if nx < 2 * mg || ny < 2 * mg {
        return Err(Error::Precondition("grid too small for the Jacobi residual".into()));
    }
    let w = nx + 1;
    let loops: Vec<LoopElement> = (0..=ny).flat_map(|iy| (0..=nx).map(move |ix| (ix, iy))).map(|(ix, iy)| y.loop_at(ix, iy)).collect();
    let nodes: Vec<(usize, usize)> = (mg..=ny - mg).flat_map(|iy| (mg..=nx - mg).map(move |ix| (ix, iy))).collect();
    let od_el = |ix: usize, iy: usize| super::cartan_element(ctx, &omega_dot.cartan_at(ix, iy));

    let mut report = ResidualReport::new();
    let (mut j1, mut j2) = (0.0f64, 0.0f64);
    for &lam in lambdas {
        let vals: Vec<Vec<Complex64>> = loops.iter().map(|l| l.evaluate(lam).coeffs).collect();
        let (a, b) = nodes
            .par_iter()
            .map(|&(ix, iy)| {
                let get = |i: usize, k: usize| Some(vals[k * w + i].as_slice());
                let (yz, yzb) = wirtinger_at(get, ix, iy, nx, ny, h).expect("interior node");
                let odg = |i: usize, k: usize| Some(omega_dot.node(i, k));
                let (odz, odzb) = wirtinger_at(odg, ix, iy, nx, ny, h).expect("interior node");
                let yv = FloatElement::from_coeffs(vals[iy * w + ix].clone());
                let od = od_el(ix, iy);
                let (oz, ozb) = field.derivatives(ctx, ix, iy);
                let (wt, wb) = twisted_w(ctx, data, &field.at(ix, iy));
                let (wt, wb) = (wt.scale(&lam), wb.scale(&lam.inv()));
                let mut phi1 = super::cartan_element(ctx, &oz);
                phi1 += &wt;
                let mut phi2 = super::cartan_element(ctx, &ozb).scale(&c(-1.0));
                phi2 += &wb;
                let mut r1 = FloatElement::from_coeffs(yz);
                r1 += &ctx.alg.bracket(&phi1, &yv);
                r1 -= &super::cartan_element(ctx, &CartanVector(odz));
                r1 -= &ctx.alg.bracket(&od, &wt);
                let mut r2 = FloatElement::from_coeffs(yzb);
                r2 += &ctx.alg.bracket(&phi2, &yv);
                r2 += &super::cartan_element(ctx, &CartanVector(odzb));
                r2 += &ctx.alg.bracket(&od, &wb);
                (r1.max_abs(), r2.max_abs())
            })
            .reduce(|| (0.0, 0.0), |p, q| (p.0.max(q.0), p.1.max(q.1)));
        j1 = j1.max(a);
        j2 = j2.max(b);
    }
    let elliptic = nodes
        .par_iter()
        .map(|&(ix, iy)| {
            let g = omega_dot;
            let lap: Vec<Complex64> =
                fd::laplacian5(g.node(ix, iy), g.node(ix + 1, iy), g.node(ix - 1, iy), g.node(ix, iy + 1), g.node(ix, iy - 1), h).into_iter().map(|z| 0.5 * z).collect();
            let od = od_el(ix, iy);
            let (wt, wb) = twisted_w(ctx, data, &field.at(ix, iy));
            let mut r = super::cartan_element(ctx, &CartanVector(lap));
            r += &ctx.alg.bracket(&wt, &ctx.alg.bracket(&od, &wb));
            r += &ctx.alg.bracket(&wb, &ctx.alg.bracket(&od, &wt));
            r.max_abs()
        })
        .reduce(|| 0.0, f64::max);
    report.push("jacobi1", h, j1, None);
    report.push("jacobi2", h, j2, None);
    report.push("jacobi_elliptic", h, elliptic, None);
    Ok(report)
}
