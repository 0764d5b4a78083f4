use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::Args;
use num_rational::BigRational;
use serde::Serialize;
use toda_core::coxeter::CoxeterAutomorphism;
use toda_core::fd::observed_order;
use toda_core::involution::{certify_compatibility, DiagramInvolution, RealForm};
use toda_core::laxflow::{
    commutation_defect, conserved_drift, integrate_flow, mc_residual, mc_residual_report, random_real_loop, unit_circle_samples,
    vacuum_loop, FieldGrid, FlowContext, FlowSpec,
};
use toda_core::rootsystem::{positive_roots_by_closure, roots_by_weyl_orbit, vacuum_dual_sum};
use toda_core::toda::{
    flow_coefficients, formal_killing_recursion, normalization_check, reconstruct_omega, toda_bracket_form, toda_residual,
    w_constancy, CyclicData, PathRule,
};
use toda_core::ChevalleyAlgebra;

use crate::{AlgebraArgs, Failure, Outcome};

#[derive(Debug, Args)]
pub struct CertifyArgs {
    #[command(flatten)]
    pub algebra: AlgebraArgs,
    /// Real form for the flow checks.
    #[arg(long, default_value_t = 0)]
    pub real_form: usize,
    /// Fine step; the coarse step is twice this.
    #[arg(long, default_value_t = 0.01, value_parser = crate::positive)]
    pub h: f64,
    /// Side of the square domain.
    #[arg(long, default_value_t = 1.0, value_parser = crate::positive)]
    pub extent: f64,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.25, value_parser = crate::positive)]
    pub amplitude: f64,
    /// Degree for the Toda checks (default `k + 1`).
    #[arg(long)]
    pub d: Option<usize>,
    /// Skip every check that integrates a flow.
    #[arg(long)]
    pub algebraic_only: bool,
    /// CSV report path (the table is always printed).
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
struct Check {
    name: String,
    value: f64,
    bound: String,
    pass: bool,
}

#[derive(Default)]
struct Checks(Vec<Check>);

impl Checks {
    fn below(&mut self, name: impl Into<String>, value: f64, bound: f64) {
        self.0.push(Check { name: name.into(), value, bound: format!("<= {bound:e}"), pass: value <= bound });
    }

    fn above(&mut self, name: impl Into<String>, value: f64, bound: f64) {
        self.0.push(Check { name: name.into(), value, bound: format!(">= {bound}"), pass: value >= bound });
    }

    fn within(&mut self, name: impl Into<String>, value: f64, lo: f64, hi: f64) {
        self.0.push(Check { name: name.into(), value, bound: format!("[{lo}, {hi}]"), pass: (lo..=hi).contains(&value) });
    }

    fn flag(&mut self, name: impl Into<String>, ok: bool) {
        self.0.push(Check { name: name.into(), value: if ok { 1.0 } else { 0.0 }, bound: "= 1".into(), pass: ok });
    }

    fn error(&mut self, name: impl Into<String>, e: impl std::fmt::Display) {
        self.0.push(Check { name: format!("{} ({e})", name.into()), value: f64::NAN, bound: "no error".into(), pass: false });
    }

    fn csv(&self) -> String {
        let mut s = String::from("check,value,bound,pass\n");
        for c in &self.0 {
            let _ = writeln!(s, "{},{:e},{},{}", c.name.replace(',', ";"), c.value, c.bound, c.pass);
        }
        s
    }
}

fn algebraic(alg: &ChevalleyAlgebra, checks: &mut Checks) {
    let rs = &alg.rs;
    let closure: BTreeSet<Vec<i32>> =
        positive_roots_by_closure(&rs.cartan_matrix).into_iter().flat_map(|r| [r.iter().map(|c| -c).collect(), r]).collect();
    let orbit = roots_by_weyl_orbit(&rs.cartan_matrix);
    checks.flag("roots_closure_vs_orbit", closure == orbit && orbit.len() == rs.roots().len());
    let max_height = rs.roots().iter().map(|r| r.height).max().unwrap_or(0) as usize;
    checks.flag("coxeter_number_is_max_height_plus_one", rs.coxeter_number == max_height + 1);

    let jacobi = alg.verify_jacobi(alg.default_jacobi_mode());
    checks.flag(format!("jacobi_{}_triples", jacobi.triples_checked), jacobi.passed());
    checks.flag("structure_constant_rules", alg.verify_constants().passed());

    let sigma = CoxeterAutomorphism::new(alg);
    checks.flag("coxeter_automorphism", sigma.is_automorphism(alg) && sigma.order_divides_k());
    for id in 0..DiagramInvolution::all(rs).len() {
        match RealForm::new(alg, id) {
            Ok(rf) => {
                let ok = rf.theta.is_involutive(alg)
                    && rf.theta.map.is_automorphism(alg)
                    && rf.certificate.kind() != "anomaly"
                    && certify_compatibility(alg, &rf.theta.map, &sigma, &rf.conj).all_true();
                checks.flag(format!("real_form_{id}_lift_and_conditions"), ok);
            }
            Err(e) => checks.error(format!("real_form_{id}"), e),
        }
    }
    let zero = BigRational::from_integer(0.into());
    checks.flag("vacuum_dual_sum_zero", vacuum_dual_sum(rs).0.iter().all(|x| *x == zero));
}

fn grid_pair(ctx: &FlowContext, xi: &toda_core::coxeter::LoopElement, args: &CertifyArgs) -> Result<[FieldGrid; 2], String> {
    let mut out = Vec::new();
    for h in [2.0 * args.h, args.h] {
        let o = integrate_flow(ctx, &FlowSpec::new(xi.clone(), args.extent, args.extent, h)).map_err(|e| e.to_string())?;
        if let Some(b) = o.blowup {
            return Err(format!("blow-up at ({}, {}) with h = {h}", b.ix, b.iy));
        }
        out.push(o.grid);
    }
    Ok([out.remove(0), out.remove(0)])
}

fn flows(ctx: &FlowContext, args: &CertifyArgs, checks: &mut Checks) -> toda_core::Result<()> {
    let lambdas = unit_circle_samples(8);
    let vacuum = vacuum_loop(ctx, 1)?;
    let steps = 10.0 * args.h;
    let out = integrate_flow(ctx, &FlowSpec::new(vacuum.clone(), steps, steps, args.h))?;
    let mut dev: f64 = 0.0;
    for iy in 0..=out.grid.ny {
        for ix in 0..=out.grid.nx {
            dev = dev.max(out.grid.loop_at(ix, iy).distance(&vacuum));
        }
    }
    checks.below("vacuum_flow_constant", dev, 1e-12);

    let xi1 = random_real_loop(ctx, 1, args.amplitude, args.seed)?;
    match grid_pair(ctx, &xi1, args) {
        Ok(g) => {
            let drift = conserved_drift(ctx, &g[1], &lambdas)?;
            checks.below("killing_sum_drift_d1", drift.series("killing_sum")[0].drift.unwrap_or(f64::INFINITY), 1e-10);
            let mc = mc_residual_report(ctx, &[&g[0], &g[1]], &lambdas)?;
            checks.above("mc_order_d1", mc.order("mc").unwrap_or(f64::NAN), 3.5);
        }
        Err(e) => checks.error("flow_d1", e),
    }

    let d = args.d.unwrap_or(ctx.k() + 1);
    let xi = random_real_loop(ctx, d, args.amplitude, args.seed)?;
    let (px, py) = (args.extent / 2.0, args.extent / 2.0);
    let defect = |h: f64| commutation_defect(ctx, &FlowSpec::new(xi.clone(), args.extent, args.extent, h), px, py);
    let (c0, c1) = (defect(2.0 * args.h)?, defect(args.h)?);
    checks.within(format!("commutation_ratio_d{d}"), c0 / c1, 12.0, 20.0);

    let g = match grid_pair(ctx, &xi, args) {
        Ok(g) => g,
        Err(e) => {
            checks.error(format!("flow_d{d}"), e);
            return Ok(());
        }
    };
    let data = CyclicData::from_element(ctx, xi.coeff(d as i64))?;
    checks.flag("top_coefficient_cyclic", data.cyclic);
    let trap = [reconstruct_omega(ctx, &g[0], PathRule::Trapezoid)?, reconstruct_omega(ctx, &g[1], PathRule::Trapezoid)?];
    let herm = [reconstruct_omega(ctx, &g[0], PathRule::Hermite)?, reconstruct_omega(ctx, &g[1], PathRule::Hermite)?];
    let (h0, h1) = (g[0].h, g[1].h);
    checks.above("loop_defect_order", observed_order(h0, trap[0].loop_defect, h1, trap[1].loop_defect), 1.8);
    let t0 = toda_residual(ctx, &herm[0].field, &data)?.sup("toda").unwrap_or(f64::NAN);
    let t1 = toda_residual(ctx, &herm[1].field, &data)?.sup("toda").unwrap_or(f64::NAN);
    checks.above("toda_residual_order", observed_order(h0, t0, h1, t1), 1.8);
    checks.below("bracket_vs_dual", toda_bracket_form(ctx, &herm[1].field, &data).sup("bracket_vs_dual").unwrap_or(f64::NAN), 1e-12);
    checks.below("w_constancy", w_constancy(ctx, &g[1], &herm[1].field)?, 1e-8);
    checks.below("normalization_spread", normalization_check(ctx, &data, &flow_coefficients(ctx, &g[1])?)?.spread, 1e-8);

    let rec = formal_killing_recursion(ctx, &herm[1].field, &data, 2)?;
    let mc = mc_residual(ctx, &g[1], &lambdas)?;
    checks.below("recursion_lax_vs_10x_mc", rec.report.sup("lax_nonneg").unwrap_or(f64::NAN), 10.0 * mc);
    checks.below("recursion_top_vs_adw", rec.report.sup("top_vs_adw").unwrap_or(f64::NAN), 1e-10);
    Ok(())
}

pub fn all(args: &CertifyArgs) -> Outcome {
    let alg = args.algebra.build()?;
    let mut checks = Checks::default();
    algebraic(&alg, &mut checks);
    if !args.algebraic_only {
        let ctx = FlowContext::from_algebra(alg, args.real_form)?;
        if let Err(e) = flows(&ctx, args, &mut checks) {
            checks.error("flow_checks", e);
        }
    }
    let csv = checks.csv();
    print!("{csv}");
    if let Some(p) = &args.report {
        std::fs::write(p, &csv).map_err(|e| anyhow::anyhow!("writing {}: {e}", p.display()))?;
    }
    let failed: Vec<&str> = checks.0.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
    if failed.is_empty() {
        println!("PASS {} checks", checks.0.len());
        Ok(())
    } else {
        println!("FAIL {} of {} checks", failed.len(), checks.0.len());
        Err(Failure::Certification(failed.join(", ")))
    }
}
