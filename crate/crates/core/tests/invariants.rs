use num_complex::Complex64;
use proptest::prelude::*;
use toda_core::coxeter::LoopElement;
use toda_core::laxflow::{
    conserved_drift, flow_line, integrate_flow, lax_field, random_real_loop, rk4_step, unit_circle_samples, Direction, FieldGrid,
    FlowContext, FlowSpec,
};
use toda_core::toda::{conj_cartan, toda_bracket_form, toda_residual, CyclicData, TodaField};
use toda_core::{CartanVector, Series};

fn contexts() -> Vec<FlowContext> {
    vec![
        FlowContext::new(Series::A, 2, 0).unwrap(),
        FlowContext::new(Series::B, 2, 0).unwrap(),
        FlowContext::new(Series::G, 2, 0).unwrap(),
        FlowContext::new(Series::A, 3, 1).unwrap(),
    ]
}

fn imaginary_part(ctx: &FlowContext, v: CartanVector<Complex64>) -> CartanVector<Complex64> {
    let c = conj_cartan(ctx, &v);
    CartanVector(v.0.iter().zip(&c.0).map(|(a, b)| 0.5 * (a - b)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn lax_field_is_real_and_graded(which in 0usize..4, seed in any::<u64>(), amp in 0.05f64..1.0) {
        let ctx = &contexts()[which];
        let d = 1 + ctx.k();
        let xi = random_real_loop(ctx, d, amp, seed).unwrap();
        let (x, y) = lax_field(ctx, &xi).unwrap();
        let scale = xi.max_abs().powi(2).max(1.0);
        for f in [&x, &y] {
            prop_assert!(f.grading_defect(&ctx.sigma) <= 1e-12 * scale);
            prop_assert!(f.reality_defect(ctx.conj()) <= 1e-12 * scale);
        }
    }

    #[test]
    fn rk4_step_keeps_grading_and_reality(which in 0usize..4, seed in any::<u64>(), y_dir in any::<bool>()) {
        let ctx = &contexts()[which];
        let xi = random_real_loop(ctx, 1 + ctx.k(), 0.3, seed).unwrap();
        let dir = if y_dir { Direction::Y } else { Direction::X };
        let next = rk4_step(ctx, &xi, 0.01, dir, 0.5);
        prop_assert!(next.grading_defect(&ctx.sigma) <= 1e-12);
        prop_assert!(next.reality_defect(ctx.conj()) <= 1e-12);
        // the top coefficient moves by a Cartan conjugation, so its Killing square is fixed
        let top = |l: &LoopElement| {
            let t = l.coeff(l.d() as i64);
            ctx.alg.killing_form(t, t)
        };
        prop_assert!((top(&next) - top(&xi)).norm() <= 1e-9 * top(&xi).norm().max(1.0));
    }

    #[test]
    fn killing_sum_conserved_on_short_lines(seed in any::<u64>()) {
        let ctx = FlowContext::new(Series::A, 2, 0).unwrap();
        let xi = random_real_loop(&ctx, 4, 0.25, seed).unwrap();
        let end = flow_line(&ctx, &xi, 0.01, 20, Direction::Y, 0.5);
        let mut g = FieldGrid::new(toda_core::laxflow::GridKind::Loop { d: 4 }, ctx.grid_meta(0.01), 1, 0);
        g.set_loop(0, 0, &xi);
        g.set_loop(1, 0, &end);
        let drift = conserved_drift(&ctx, &g, &unit_circle_samples(6)).unwrap();
        for row in &drift.rows {
            prop_assert!(row.drift.unwrap() < 1e-7, "{} drift {:e}", row.name, row.drift.unwrap());
        }
    }

    #[test]
    fn bracket_and_dual_forms_agree(which in 0usize..4, a in proptest::collection::vec(-1.0f64..1.0, 8), b in proptest::collection::vec(-1.0f64..1.0, 8)) {
        let ctx = &contexts()[which];
        let rank = ctx.alg.rank();
        let data = CyclicData::new(ctx, toda_core::laxflow::vacuum_coefficients(ctx).unwrap()).unwrap();
        let field = TodaField::from_fn(ctx, 4, 4, 0.1, |x, y| {
            imaginary_part(ctx, CartanVector((0..rank).map(|i| Complex64::new(a[i] * x + b[i] * y, a[i + 4] - b[i + 4] * x * y)).collect()))
        });
        let rep = toda_bracket_form(ctx, &field, &data);
        prop_assert!(rep.sup("bracket_vs_dual").unwrap() < 1e-12);
        prop_assert!(rep.sup("bracket_off_cartan").unwrap() < 1e-12);
    }

    #[test]
    fn grid_roundtrip(seed in any::<u64>(), nx in 0usize..4, ny in 0usize..4) {
        let ctx = FlowContext::new(Series::A, 2, 0).unwrap();
        let xi = random_real_loop(&ctx, 1, 0.5, seed).unwrap();
        let h = 0.05;
        let out = integrate_flow(&ctx, &FlowSpec::new(xi, nx as f64 * h, ny as f64 * h, h)).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("grid.bin");
        out.grid.save(&path).unwrap();
        prop_assert_eq!(FieldGrid::load(&path).unwrap(), out.grid);
    }
}

#[test]
fn constant_field_residual_matches_masses() {
    // a constant Omega has zero Laplacian, so the residual is the exponential sum itself
    let ctx = FlowContext::new(Series::A, 2, 0).unwrap();
    let data = CyclicData::new(&ctx, toda_core::laxflow::vacuum_coefficients(&ctx).unwrap()).unwrap();
    let t = imaginary_part(&ctx, CartanVector(vec![Complex64::new(0.3, 0.0), Complex64::new(-0.1, 0.0)]));
    let field = TodaField::constant(&ctx, t.clone(), 6, 6, 0.1);
    let rhs = toda_core::toda::toda_rhs_dual(&ctx, &data.masses, &data.duals, &t);
    let expect = rhs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let got = toda_residual(&ctx, &field, &data).unwrap().sup("toda").unwrap();
    assert!((got - expect).abs() <= 1e-12 * expect.max(1.0), "{got} vs {expect}");
}

#[test]
fn loop_widen_and_truncate_invert() {
    let ctx = FlowContext::new(Series::G, 2, 0).unwrap();
    let xi = random_real_loop(&ctx, 1, 1.0, 3).unwrap();
    let (back, lost) = xi.widen(7).truncate(1);
    assert_eq!(lost, 0.0);
    assert_eq!(back, xi);
}
