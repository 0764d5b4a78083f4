use std::path::Path;

use anyhow::{bail, Context};
use num_complex::Complex64;
use serde::Deserialize;
use toda_core::coxeter::LoopElement;
use toda_core::element::AlgebraElement;
use toda_core::laxflow::{
    adapted_check, conserved_drift, integrate_flow, mc_residual, random_real_loop, unit_circle_samples, vacuum_loop, FlowContext,
    FlowSpec, ResidualReport, DEFAULT_BLOWUP_BOUND, R_HALF,
};
use toda_core::Series;

use crate::{plot, Failure, Outcome};

/// Flow spec as read from JSON.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowFile {
    #[serde(rename = "type")]
    pub series: Series,
    pub rank: usize,
    #[serde(default)]
    pub real_form: usize,
    pub d: usize,
    pub xi0: InitialData,
    #[serde(rename = "Lx")]
    pub lx: f64,
    #[serde(rename = "Ly")]
    pub ly: f64,
    pub h: f64,
    #[serde(default = "default_bound")]
    pub blowup_bound: f64,
    #[serde(default = "default_r")]
    pub r: f64,
}

fn default_bound() -> f64 {
    DEFAULT_BLOWUP_BOUND
}

fn default_r() -> f64 {
    R_HALF
}

/// Explicit coefficients `xi_{-d}, ..., xi_d` (each a list of `[re, im]`), seeded random data, or the vacuum.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum InitialData {
    Coefficients(Vec<Vec<Complex64>>),
    Random { random: RandomData },
    Named(String),
}

#[derive(Debug, Deserialize)]
pub struct RandomData {
    pub seed: u64,
    #[serde(default = "default_amplitude")]
    pub amplitude: f64,
}

fn default_amplitude() -> f64 {
    0.25
}

impl FlowFile {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing flow spec {}", path.display()))
    }

    pub fn context(&self) -> anyhow::Result<FlowContext> {
        Ok(FlowContext::new(self.series, self.rank, self.real_form)?)
    }

    pub fn build(&self, ctx: &FlowContext) -> anyhow::Result<FlowSpec> {
        let xi0 = match &self.xi0 {
            InitialData::Coefficients(c) => {
                LoopElement::from_coeffs(self.d, c.iter().map(|x| AlgebraElement::from_coeffs(x.clone())).collect())?
            }
            InitialData::Random { random } => random_real_loop(ctx, self.d, random.amplitude, random.seed)?,
            InitialData::Named(n) if n == "vacuum" => vacuum_loop(ctx, self.d)?,
            InitialData::Named(n) => bail!("unknown initial data {n:?}"),
        };
        if xi0.coeff(self.d as i64).dim() != ctx.dim() {
            bail!("initial coefficients must have length {}", ctx.dim());
        }
        let mut spec = FlowSpec::new(xi0, self.lx, self.ly, self.h);
        spec.blowup_bound = self.blowup_bound;
        spec.r = self.r;
        spec.validate(ctx)?;
        Ok(spec)
    }
}

pub fn run(spec_path: &Path, out: &Path, report_path: &Path, plot_path: Option<&Path>, lambdas: usize) -> Outcome {
    if lambdas == 0 {
        return Err(anyhow::anyhow!("at least one lambda sample is needed").into());
    }
    let file = FlowFile::load(spec_path)?;
    let ctx = file.context()?;
    let spec = file.build(&ctx)?;
    let outcome = integrate_flow(&ctx, &spec)?;
    let grid = &outcome.grid;
    grid.save(out)?;

    let samples = unit_circle_samples(lambdas);
    let mut report = ResidualReport::new();
    report.push("projection_defect", spec.h, outcome.projection_defect, None);
    report.push("reality_defect", spec.h, outcome.reality_defect, None);
    if let Ok(drift) = conserved_drift(&ctx, grid, &samples) {
        report.extend(drift);
    }
    if grid.nx >= 4 && grid.ny >= 4 {
        report.push("mc", spec.h, mc_residual(&ctx, grid, &samples)?, None);
    }
    if let Ok(adapted) = adapted_check(&ctx, grid) {
        report.push("adapted", spec.h, adapted.max_deviation, None);
    }
    if let Some(b) = outcome.blowup {
        report.push("blowup", spec.h, b.norm, None);
    }
    report.save_csv(report_path)?;
    if let Some(p) = plot_path {
        plot::emit_plot(&report, p)?;
    }
    match outcome.blowup {
        Some(b) => Err(Failure::BlowUp(format!(
            "norm {:.3e} at node ({}, {}); grid truncated to {}x{}",
            b.norm, b.ix, b.iy, grid.nx, grid.ny
        ))),
        None => Ok(()),
    }
}
