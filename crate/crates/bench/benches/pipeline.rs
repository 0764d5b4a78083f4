use criterion::{black_box, criterion_group, criterion_main, Criterion};
use toda_bench::{a2_context, dense_element, seeded_loop, toda_fixture};
use toda_core::laxflow::{rk4_step, Direction, R_HALF};
use toda_core::toda::formal_killing_recursion;
use toda_core::{ChevalleyAlgebra, Series};

fn bracket(c: &mut Criterion) {
    let alg = ChevalleyAlgebra::from_type(Series::E, 8).unwrap();
    let (a, b) = (dense_element(alg.dim()), dense_element(alg.dim()).scale(&num_complex::Complex64::new(0.0, 1.0)));
    c.bench_function("bracket_e8_dense", |bench| bench.iter(|| alg.bracket(black_box(&a), black_box(&b))));
}

fn build(c: &mut Criterion) {
    let mut g = c.benchmark_group("build");
    g.sample_size(10);
    g.bench_function("chevalley_e8", |bench| bench.iter(|| ChevalleyAlgebra::from_type(Series::E, 8).unwrap()));
    g.finish();
}

fn rk4(c: &mut Criterion) {
    let ctx = a2_context();
    let xi = seeded_loop(&ctx, 4);
    c.bench_function("rk4_step_a2_d4", |bench| bench.iter(|| rk4_step(&ctx, black_box(&xi), 0.01, Direction::X, R_HALF)));
}

fn recursion(c: &mut Criterion) {
    let (ctx, _, field, data) = toda_fixture(12, 0.02);
    let mut g = c.benchmark_group("recursion");
    g.sample_size(10);
    g.bench_function("killing_recursion_a2_order2_13x13", |bench| bench.iter(|| formal_killing_recursion(&ctx, &field, &data, 2).unwrap()));
    g.finish();
}

criterion_group!(benches, bracket, build, rk4, recursion);
criterion_main!(benches);
