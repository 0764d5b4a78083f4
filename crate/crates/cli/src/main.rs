#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod algebra;
mod certify;
mod flow;
mod plot;
mod toda;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use toda_core::{ChevalleyAlgebra, Series};

/// Chevalley bases, real forms, Coxeter gradings, Lax flows and affine Toda checks.
#[derive(Debug, Parser)]
#[command(name = "toda", version)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Root system and structure constants of a simple Lie algebra.
    Algebra {
        #[command(subcommand)]
        command: AlgebraCommand,
    },
    /// Involutions of the extended Dynkin diagram, their lifts and certificates.
    Involutions {
        #[command(flatten)]
        algebra: AlgebraArgs,
        #[arg(long)]
        json: bool,
    },
    /// Dimensions of the Coxeter grading and cyclicity of the vacuum element.
    Grading {
        #[command(flatten)]
        algebra: AlgebraArgs,
        /// Real form used to build the vacuum element.
        #[arg(long, default_value_t = 0)]
        real_form: usize,
        /// Relative tolerance for the cyclicity test.
        #[arg(long, default_value_t = toda_core::coxeter::DEFAULT_CYCLIC_TOLERANCE)]
        cyclic_tol: f64,
    },
    /// Integrate the commuting Lax flows on a rectangle.
    Flow {
        #[command(subcommand)]
        command: FlowCommand,
    },
    /// Affine Toda residuals, reconstruction of Omega and the formal Killing field recursion.
    Toda {
        #[command(subcommand)]
        command: TodaCommand,
    },
    /// Run the full property suite for one algebra.
    Certify {
        #[command(subcommand)]
        command: CertifyCommand,
    },
}

#[derive(Debug, Args, Clone)]
pub struct AlgebraArgs {
    /// Series letter A-G.
    #[arg(long = "type", value_parser = parse_series)]
    pub series: Series,
    #[arg(long)]
    pub rank: usize,
}

impl AlgebraArgs {
    pub fn build(&self) -> anyhow::Result<ChevalleyAlgebra> {
        Ok(ChevalleyAlgebra::from_type(self.series, self.rank)?)
    }
}

fn parse_series(s: &str) -> Result<Series, String> {
    let mut chars = s.chars();
    match (chars.next(), chars.next()) {
        (Some(c), None) => Series::from_letter(c.to_ascii_uppercase()).map_err(|e| e.to_string()),
        _ => Err(format!("expected a single series letter, got {s:?}")),
    }
}

fn positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("expected a positive number, got {s:?}")),
    }
}

#[derive(Debug, Subcommand)]
pub enum AlgebraCommand {
    /// Cartan matrix, roots, marks and Coxeter number.
    Info {
        #[command(flatten)]
        algebra: AlgebraArgs,
        #[arg(long)]
        json: bool,
    },
    /// Structure constants `c_{alpha,beta}` for positive-sum pairs of roots.
    Constants {
        #[command(flatten)]
        algebra: AlgebraArgs,
        #[arg(long)]
        csv: bool,
    },
}

#[derive(Debug, Subcommand)]
pub enum FlowCommand {
    /// Integrate from a JSON flow spec, writing the grid and a residual report.
    Run {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        report: PathBuf,
        /// Optional log-log residual plot (SVG).
        #[arg(long)]
        plot: Option<PathBuf>,
        /// Number of unit-circle samples of lambda for residuals.
        #[arg(long, default_value_t = 8)]
        lambdas: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum TodaCommand {
    /// Toda equation residuals of a stored Omega against cyclic data.
    Check {
        #[arg(long)]
        omega: PathBuf,
        /// JSON `{"r": [[re, im], ...], "conjugation": id}`.
        #[arg(long = "W")]
        w: PathBuf,
        #[arg(long)]
        report: PathBuf,
        #[arg(long)]
        plot: Option<PathBuf>,
        /// Largest accepted sup residual of the Toda equation.
        #[arg(long, default_value_t = 1e-3, value_parser = positive)]
        tol: f64,
    },
    /// Reconstruct Omega from a flow grid by path integration.
    Reconstruct {
        #[arg(long)]
        grid: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = Rule::Hermite)]
        rule: Rule,
        #[arg(long)]
        report: Option<PathBuf>,
        /// Write the cyclic data read off the origin as JSON for `toda check`.
        #[arg(long = "W-out")]
        w_out: Option<PathBuf>,
        /// Fail when the loop defect exceeds this value.
        #[arg(long, value_parser = positive)]
        tol: Option<f64>,
    },
    /// Formal Killing field recursion on a flow grid.
    Recursion {
        #[arg(long)]
        grid: PathBuf,
        #[arg(long, default_value_t = 2)]
        order: usize,
        #[arg(long, value_enum, default_value_t = Rule::Hermite)]
        rule: Rule,
        #[arg(long)]
        report: PathBuf,
        /// Also evaluate the Jacobi equations for the field built with this `l`.
        #[arg(long)]
        jacobi_l: Option<usize>,
        #[arg(long, default_value_t = 8)]
        lambdas: usize,
    },
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
pub enum Rule {
    Trapezoid,
    Hermite,
}

impl From<Rule> for toda_core::toda::PathRule {
    fn from(r: Rule) -> Self {
        match r {
            Rule::Trapezoid => toda_core::toda::PathRule::Trapezoid,
            Rule::Hermite => toda_core::toda::PathRule::Hermite,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum CertifyCommand {
    /// Every check for one algebra; one row per check.
    All(certify::CertifyArgs),
}

/// Non-success outcomes, each with its own exit status.
#[derive(Debug)]
pub enum Failure {
    Usage(anyhow::Error),
    Certification(String),
    BlowUp(String),
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Usage(e.into())
    }
}

pub type Outcome = Result<(), Failure>;

fn configure_threads() -> anyhow::Result<()> {
    if let Ok(v) = std::env::var("TODA_THREADS") {
        let n: usize = v.parse().map_err(|_| anyhow::anyhow!("TODA_THREADS must be a positive integer, got {v:?}"))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn run(config: RunConfig) -> Outcome {
    configure_threads()?;
    match config.command {
        Command::Algebra { command } => match command {
            AlgebraCommand::Info { algebra, json } => algebra::info(&algebra, json),
            AlgebraCommand::Constants { algebra, csv } => algebra::constants(&algebra, csv),
        },
        Command::Involutions { algebra, json } => algebra::involutions(&algebra, json),
        Command::Grading { algebra, real_form, cyclic_tol } => algebra::grading(&algebra, real_form, cyclic_tol),
        Command::Flow { command: FlowCommand::Run { spec, out, report, plot, lambdas } } => flow::run(&spec, &out, &report, plot.as_deref(), lambdas),
        Command::Toda { command } => match command {
            TodaCommand::Check { omega, w, report, plot, tol } => toda::check(&omega, &w, &report, plot.as_deref(), tol),
            TodaCommand::Reconstruct { grid, out, rule, report, w_out, tol } => {
                toda::reconstruct(&grid, &out, rule.into(), report.as_deref(), w_out.as_deref(), tol)
            }
            TodaCommand::Recursion { grid, order, rule, report, jacobi_l, lambdas } => {
                toda::recursion(&grid, order, rule.into(), &report, jacobi_l, lambdas)
            }
        },
        Command::Certify { command: CertifyCommand::All(args) } => certify::all(&args),
    }
}

fn main() -> ExitCode {
    let config = match RunConfig::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(config) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Certification(msg)) => {
            eprintln!("certification failed: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::BlowUp(msg)) => {
            eprintln!("numerical blow-up: {msg}");
            ExitCode::from(3)
        }
    }
}
