use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::{FieldGrid, FlowContext, GridKind, R_HALF};
use crate::coxeter::{is_cyclic, LoopElement, DEFAULT_CYCLIC_TOLERANCE};
use crate::element::FloatElement;
use crate::error::{Error, Result};
use crate::fd;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualRow {
    pub name: String,
    pub h: f64,
    pub sup_residual: f64,
    pub order: Option<f64>,
    pub drift: Option<f64>,
}

/// Named residual series; rows sharing a name form one convergence study.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ResidualReport {
    pub rows: Vec<ResidualRow>,
}

impl ResidualReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, name: &str, h: f64, sup_residual: f64, drift: Option<f64>) {
        self.rows.push(ResidualRow { name: name.to_string(), h, sup_residual, order: None, drift });
    }

    pub fn extend(&mut self, other: ResidualReport) {
        self.rows.extend(other.rows);
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn series(&self, name: &str) -> Vec<&ResidualRow> {
        self.rows.iter().filter(|r| r.name == name).collect()
    }

    pub fn names(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for r in &self.rows {
            if !out.contains(&r.name) {
                out.push(r.name.clone());
            }
        }
        out
    }

    /// Largest `sup_residual` among rows named `name`.
    pub fn sup(&self, name: &str) -> Option<f64> {
        self.series(name).iter().map(|r| r.sup_residual).reduce(f64::max)
    }

    /// Fills `order` on each row from the previous row of the same name with a larger step.
    pub fn fill_orders(&mut self) {
        for i in 0..self.rows.len() {
            let prev = (0..i).rev().find(|&j| self.rows[j].name == self.rows[i].name && self.rows[j].h > self.rows[i].h);
            if let Some(j) = prev {
                let (a, b) = (&self.rows[j], &self.rows[i]);
                let order = fd::observed_order(a.h, a.sup_residual, b.h, b.sup_residual);
                self.rows[i].order = order.is_finite().then_some(order);
            }
        }
    }

    /// Most recently measured order of the series `name`.
    pub fn order(&self, name: &str) -> Option<f64> {
        self.series(name).iter().rev().find_map(|r| r.order)
    }

    pub fn write_csv<W: Write>(&self, w: &mut W) -> Result<()> {
        writeln!(w, "name,h,sup_residual,order,drift")?;
        let opt = |v: Option<f64>| v.map(|x| format!("{x:e}")).unwrap_or_default();
        for r in &self.rows {
            writeln!(w, "{},{:e},{:e},{},{}", r.name, r.h, r.sup_residual, opt(r.order), opt(r.drift))?;
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii")
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }
}

/// `n` equally spaced points `exp(2 pi i j / n)`.
pub fn unit_circle_samples(n: usize) -> Vec<Complex64> {
    (0..n).map(|j| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * j as f64 / n as f64)).collect()
}

fn require_loop(grid: &FieldGrid) -> Result<usize> {
    match grid.kind {
        GridKind::Loop { d } => Ok(d),
        GridKind::Cartan => Err(Error::Precondition("expected a grid of loop elements".into())),
    }
}

/// Invariants at one node: `sum_j kappa(xi_j, xi_{-j})`, then `tr (ad xi(lambda))^2` and `^4` per sample.
fn invariants(ctx: &FlowContext, xi: &LoopElement, lambdas: &[Complex64]) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(1 + 2 * lambdas.len());
    out.push(xi.degrees().map(|j| ctx.alg.killing_form(xi.coeff(j), xi.coeff(-j))).sum());
    for &l in lambdas {
        let m = ctx.alg.adjoint_matrix(&xi.evaluate(l));
        let m2 = &m * &m;
        out.push(m2.trace());
        out.push((&m2 * &m2).trace());
    }
    out
}

/// Drift of the ad-invariant polynomials across the grid, relative to their origin values
/// (floored at one so that vanishing invariants report absolute drift).
pub fn conserved_drift(ctx: &FlowContext, grid: &FieldGrid, lambdas: &[Complex64]) -> Result<ResidualReport> {
    require_loop(grid)?;
    let origin = invariants(ctx, &grid.loop_at(0, 0), lambdas);
    let nodes: Vec<(usize, usize)> = (0..=grid.ny).flat_map(|iy| (0..=grid.nx).map(move |ix| (ix, iy))).collect();
    let dev = nodes
        .par_iter()
        .map(|&(ix, iy)| {
            let v = invariants(ctx, &grid.loop_at(ix, iy), lambdas);
            v.iter().zip(&origin).map(|(a, b)| (a - b).norm()).collect::<Vec<f64>>()
        })
        .reduce(|| vec![0.0; origin.len()], |a, b| a.iter().zip(&b).map(|(x, y)| x.max(*y)).collect());
    let rel = |i: usize| dev[i] / origin[i].norm().max(1.0);
    let mut report = ResidualReport::new();
    report.push("killing_sum", grid.h, dev[0], Some(rel(0)));
    for (p, name) in [(0usize, "trace_ad2"), (1, "trace_ad4")] {
        let idx: Vec<usize> = (0..lambdas.len()).map(|s| 1 + 2 * s + p).collect();
        if idx.is_empty() {
            continue;
        }
        let abs = idx.iter().map(|&i| dev[i]).fold(0.0, f64::max);
        let r = idx.iter().map(|&i| rel(i)).fold(0.0, f64::max);
        report.push(name, grid.h, abs, Some(r));
    }
    Ok(report)
}

fn flatten(v: Vec<FloatElement>) -> Vec<Vec<Complex64>> {
    v.into_iter().map(|e| e.coeffs).collect()
}

/// Sup norm over interior nodes and samples of `d_z B - d_zbar A + [A, B]` for
/// `A = lambda xi_d + xi_{d-1}/2`, `B = lambda^{-1} xi_{-d} + conj(xi_{d-1})/2`,
/// with fourth-order central differences (two-node margin).
pub fn mc_residual(ctx: &FlowContext, grid: &FieldGrid, lambdas: &[Complex64]) -> Result<f64> {
    let d = require_loop(grid)? as i64;
    if grid.nx < 4 || grid.ny < 4 {
        return Err(Error::Precondition("mc_residual needs at least 5x5 nodes".into()));
    }
    let w = grid.nx + 1;
    let half = Complex64::new(R_HALF, 0.0);
    let loops: Vec<LoopElement> = (0..=grid.ny).flat_map(|iy| (0..=grid.nx).map(move |ix| (ix, iy))).map(|(ix, iy)| grid.loop_at(ix, iy)).collect();
    let sups: Vec<f64> = lambdas
        .par_iter()
        .map(|&l| {
            let mut a = Vec::with_capacity(loops.len());
            let mut b = Vec::with_capacity(loops.len());
            for xi in &loops {
                let mut ai = xi.coeff(d).scale(&l);
                ai.add_scaled(xi.coeff(d - 1), &half);
                let mut bi = xi.coeff(-d).scale(&l.inv());
                bi.add_scaled(&ctx.conj().apply(xi.coeff(d - 1)), &half);
                a.push(ai);
                b.push(bi);
            }
            let (fa, fb) = (flatten(a.clone()), flatten(b.clone()));
            fn at(f: &[Vec<Complex64>], w: usize, ix: usize, iy: usize) -> &[Complex64] {
                &f[iy * w + ix]
            }
            let mut sup: f64 = 0.0;
            for iy in 2..=grid.ny - 2 {
                for ix in 2..=grid.nx - 2 {
                    let dx = |f: &[Vec<Complex64>]| fd::central4(at(f, w, ix - 2, iy), at(f, w, ix - 1, iy), at(f, w, ix + 1, iy), at(f, w, ix + 2, iy), grid.h);
                    let dy = |f: &[Vec<Complex64>]| fd::central4(at(f, w, ix, iy - 2), at(f, w, ix, iy - 1), at(f, w, ix, iy + 1), at(f, w, ix, iy + 2), grid.h);
                    let (bz, _) = fd::wirtinger(&dx(&fb), &dy(&fb));
                    let (_, azb) = fd::wirtinger(&dx(&fa), &dy(&fa));
                    let br = ctx.alg.bracket(&a[iy * w + ix], &b[iy * w + ix]);
                    for i in 0..br.dim() {
                        sup = sup.max((bz[i] - azb[i] + br.coeffs[i]).norm());
                    }
                }
            }
            sup
        })
        .collect();
    Ok(sups.into_iter().fold(0.0, f64::max))
}

/// One `mc` row per grid (coarse to fine), with observed orders filled in.
pub fn mc_residual_report(ctx: &FlowContext, grids: &[&FieldGrid], lambdas: &[Complex64]) -> Result<ResidualReport> {
    let mut report = ResidualReport::new();
    for g in grids {
        report.push("mc", g.h, mc_residual(ctx, g, lambdas)?, None);
    }
    report.fill_orders();
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdaptedReport {
    pub adapted: bool,
    pub max_deviation: f64,
    /// Whether `xi_d` is cyclic at every node.
    pub cyclic: bool,
    pub noncyclic_nodes: usize,
}

/// Compares the stored connection at each node with the adapted combination of the stored `xi`.
pub fn adapted_check(ctx: &FlowContext, grid: &FieldGrid) -> Result<AdaptedReport> {
    let d = require_loop(grid)? as i64;
    if grid.connection().is_none() {
        return Err(Error::Precondition("grid carries no connection form".into()));
    }
    let mut dev: f64 = 0.0;
    let mut scale: f64 = 0.0;
    let mut noncyclic = 0;
    for iy in 0..=grid.ny {
        for ix in 0..=grid.nx {
            let xi = grid.loop_at(ix, iy);
            let expected = super::connection_coefficients(ctx, &xi, R_HALF);
            let stored = grid.connection_at(ix, iy).expect("checked above");
            for (a, b) in expected.iter().zip(stored) {
                dev = dev.max((a - b).norm());
                scale = scale.max(a.norm());
            }
            let top = xi.coeff(d);
            let cyclic = is_cyclic(&ctx.alg, &ctx.sigma, top, DEFAULT_CYCLIC_TOLERANCE).unwrap_or_default();
            if !cyclic {
                noncyclic += 1;
            }
        }
    }
    Ok(AdaptedReport { adapted: dev <= 1e-14 * scale.max(1.0), max_deviation: dev, cyclic: noncyclic == 0, noncyclic_nodes: noncyclic })
}
