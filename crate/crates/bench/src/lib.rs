//! Fixtures shared by the benchmarks.

use toda_core::coxeter::LoopElement;
use toda_core::laxflow::{integrate_flow, random_real_loop, FieldGrid, FlowContext, FlowSpec};
use toda_core::{FloatElement, Series};
use toda_core::toda::{reconstruct_omega, CyclicData, PathRule, TodaField};

pub fn a2_context() -> FlowContext {
    FlowContext::new(Series::A, 2, 0).expect("compact A2")
}

/// Seeded real loop element of degree `d`.
pub fn seeded_loop(ctx: &FlowContext, d: usize) -> LoopElement {
    random_real_loop(ctx, d, 0.25, 7).expect("valid degree")
}

/// Dense element with deterministic nonzero coefficients.
pub fn dense_element(dim: usize) -> FloatElement {
    FloatElement::from_coeffs((0..dim).map(|i| num_complex::Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos())).collect())
}

/// A degree-4 A2 flow on a small square with its reconstructed `Omega` and cyclic data.
pub fn toda_fixture(n: usize, h: f64) -> (FlowContext, FieldGrid, TodaField, CyclicData) {
    let ctx = a2_context();
    let xi = seeded_loop(&ctx, 4);
    let data = CyclicData::from_element(&ctx, xi.coeff(4)).expect("cyclic");
    let grid = integrate_flow(&ctx, &FlowSpec::new(xi, n as f64 * h, n as f64 * h, h)).expect("flow").grid;
    let field = reconstruct_omega(&ctx, &grid, PathRule::Hermite).expect("reconstruction").field;
    (ctx, grid, field, data)
}
