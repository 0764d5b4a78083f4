use std::path::Path;

use anyhow::{bail, Context};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use toda_core::laxflow::{mc_residual, unit_circle_samples, FieldGrid, FlowContext, GridKind, ResidualReport};
use toda_core::toda::{
    build_yl_grid, flow_coefficients, formal_killing_recursion, jacobi_residual, normalization_check, reconstruct_omega,
    toda_bracket_form, toda_frame_form, toda_residual, w_constancy, CyclicData, PathRule, Reconstruction, TodaField,
};

use crate::{plot, Failure, Outcome};

/// Cyclic data as read from JSON.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CyclicFile {
    pub r: Vec<Complex64>,
    pub conjugation: usize,
}

fn load_grid(path: &Path) -> anyhow::Result<FieldGrid> {
    FieldGrid::load(path).with_context(|| format!("reading grid {}", path.display()))
}

fn context_for(grid: &FieldGrid, real_form: usize) -> anyhow::Result<FlowContext> {
    if grid.real_form != real_form {
        bail!("grid was produced for real form {} but real form {real_form} was requested", grid.real_form);
    }
    Ok(FlowContext::new(grid.series, grid.rank, real_form)?)
}

pub fn check(omega_path: &Path, w_path: &Path, report_path: &Path, plot_path: Option<&Path>, tol: f64) -> Outcome {
    let grid = load_grid(omega_path)?;
    if grid.kind != GridKind::Cartan {
        return Err(anyhow::anyhow!("{} is not an Omega grid", omega_path.display()).into());
    }
    let text = std::fs::read_to_string(w_path).with_context(|| format!("reading {}", w_path.display()))?;
    let w: CyclicFile = serde_json::from_str(&text).with_context(|| format!("parsing {}", w_path.display()))?;
    let ctx = context_for(&grid, w.conjugation)?;
    let data = CyclicData::new(&ctx, w.r)?;
    let field = TodaField::new(grid)?;
    let h = field.h();

    let mut report = toda_residual(&ctx, &field, &data)?;
    report.extend(toda_bracket_form(&ctx, &field, &data));
    if let Ok(frame) = toda_frame_form(&ctx, &field, &data) {
        report.extend(frame);
    }
    report.push("omega_reality", h, field.reality_defect(&ctx), None);
    report.push("mass_hypothesis", h, data.mass_hypothesis_defect(), None);
    report.save_csv(report_path)?;
    if let Some(p) = plot_path {
        plot::emit_plot(&report, p)?;
    }
    let sup = report.sup("toda").unwrap_or(f64::INFINITY);
    if !data.cyclic {
        return Err(Failure::Certification("W is not cyclic".into()));
    }
    if !(sup <= tol) {
        return Err(Failure::Certification(format!("Toda residual {sup:.3e} exceeds {tol:.1e}")));
    }
    Ok(())
}

/// Cyclic data read off the top coefficient at the origin, where `Omega = 0`.
fn origin_data(ctx: &FlowContext, grid: &FieldGrid) -> anyhow::Result<CyclicData> {
    let d = grid.d().context("expected a flow grid")?;
    Ok(CyclicData::from_element(ctx, grid.loop_at(0, 0).coeff(d as i64))?)
}

fn reconstruct_report(ctx: &FlowContext, grid: &FieldGrid, rec: &Reconstruction, data: &CyclicData) -> anyhow::Result<ResidualReport> {
    let h = grid.h;
    let mut report = ResidualReport::new();
    report.push("loop_defect", h, rec.loop_defect, None);
    report.push("omega_reality", h, rec.reality_defect, None);
    report.push("w_constancy", h, w_constancy(ctx, grid, &rec.field)?, None);
    report.extend(normalization_check(ctx, data, &flow_coefficients(ctx, grid)?)?.to_report(h));
    if let Ok(t) = toda_residual(ctx, &rec.field, data) {
        report.extend(t);
    }
    Ok(report)
}

pub fn reconstruct(
    grid_path: &Path,
    out: &Path,
    rule: PathRule,
    report_path: Option<&Path>,
    w_out: Option<&Path>,
    tol: Option<f64>,
) -> Outcome {
    let grid = load_grid(grid_path)?;
    let ctx = context_for(&grid, grid.real_form)?;
    let rec = reconstruct_omega(&ctx, &grid, rule)?;
    rec.field.omega.save(out)?;
    if report_path.is_some() || w_out.is_some() {
        let data = origin_data(&ctx, &grid)?;
        if let Some(p) = report_path {
            reconstruct_report(&ctx, &grid, &rec, &data)?.save_csv(p)?;
        }
        if let Some(p) = w_out {
            let file = CyclicFile { r: data.r.clone(), conjugation: grid.real_form };
            std::fs::write(p, serde_json::to_string_pretty(&file)?)?;
        }
    }
    match tol {
        Some(t) if !(rec.loop_defect <= t) => Err(Failure::Certification(format!("loop defect {:.3e} exceeds {t:.1e}", rec.loop_defect))),
        _ => Ok(()),
    }
}

pub fn recursion(grid_path: &Path, order: usize, rule: PathRule, report_path: &Path, jacobi_l: Option<usize>, lambdas: usize) -> Outcome {
    if lambdas == 0 {
        return Err(anyhow::anyhow!("at least one lambda sample is needed").into());
    }
    let grid = load_grid(grid_path)?;
    let ctx = context_for(&grid, grid.real_form)?;
    let rec = reconstruct_omega(&ctx, &grid, rule)?;
    let data = origin_data(&ctx, &grid)?;
    let result = formal_killing_recursion(&ctx, &rec.field, &data, order)?;
    let samples = unit_circle_samples(lambdas);
    let mut report = result.report.clone();
    if grid.nx >= 4 && grid.ny >= 4 {
        report.push("mc", grid.h, mc_residual(&ctx, &grid, &samples)?, None);
    }
    if let Some(l) = jacobi_l {
        let (y, omega_dot) = build_yl_grid(&ctx, &result, l)?;
        report.extend(jacobi_residual(&ctx, &y, &omega_dot, &rec.field, &data, &samples, 2 * order)?);
    }
    report.save_csv(report_path)?;
    Ok(())
}
