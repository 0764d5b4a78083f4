use super::*;
use crate::exact::to_f64;
use crate::laxflow::{integrate_flow, random_real_loop, vacuum_coefficients, vacuum_loop, FlowSpec};
use crate::rootsystem::Series;

fn a2() -> FlowContext {
    FlowContext::new(Series::A, 2, 0).unwrap()
}

fn vacuum_data(ctx: &FlowContext) -> CyclicData {
    CyclicData::new(ctx, vacuum_coefficients(ctx).unwrap()).unwrap()
}

fn cv(v: &[f64]) -> CV {
    CartanVector(v.iter().map(|&x| Complex64::new(x, 0.0)).collect())
}

#[test]
fn compact_a2_masses() {
    // kappa(alpha^#, alpha^#) = 1/3 for every root of sl(3); compact signs are -1
    let ctx = a2();
    let r = vec![Complex64::new(0.5, 0.2), Complex64::new(-1.0, 0.0), Complex64::new(0.0, 2.0)];
    let data = CyclicData::new(&ctx, r.clone()).unwrap();
    for j in 0..3 {
        assert!((data.masses[j] - (-6.0 * r[j].norm_sqr())).norm() < 1e-12);
    }
    assert!(data.cyclic);
    assert!(data.mass_hypothesis_defect() < 1e-15);
}

#[test]
fn zeroed_coefficient_is_not_cyclic() {
    let ctx = a2();
    let data = CyclicData::new(&ctx, vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]).unwrap();
    assert!(!data.cyclic);
}

#[test]
fn vacuum_field_with_mark_masses_has_zero_residual() {
    for (s, n) in [(Series::A, 2), (Series::B, 3), (Series::G, 2), (Series::E, 6)] {
        let ctx = FlowContext::new(s, n, 0).unwrap();
        let marks: Vec<Complex64> = ctx.alg.rs.extended_marks().iter().map(|&m| Complex64::new(m as f64, 0.0)).collect();
        let field = TodaField::constant(&ctx, cv(&vec![0.0; n]), 4, 4, 0.1);
        let rep = toda_residual_with_masses(&ctx, &field, &marks).unwrap();
        assert!(rep.sup("toda").unwrap() < 1e-13, "{s}{n}");
    }
}

#[test]
fn constant_field_residual_matches_direct_sum() {
    let ctx = a2();
    let data = vacuum_data(&ctx);
    let c = [0.3, -0.7];
    let field = TodaField::constant(&ctx, cv(&c), 3, 3, 0.1);
    let rep = toda_residual(&ctx, &field, &data).unwrap();
    // direct: alpha_j(c) from the Cartan matrix, duals from the exact Killing form
    let rs = &ctx.alg.rs;
    let mut expected = [0.0f64; 2];
    for (j, root) in rs.extended_simple_roots().iter().enumerate() {
        let a: f64 = (0..2).map(|i| c[i] * rs.eval_on_coroot(&root.coeffs, i) as f64).sum();
        let dual = rs.killing_dual(&root.coeffs);
        for i in 0..2 {
            expected[i] -= data.masses[j].re * (2.0 * a).exp() * to_f64(&dual.0[i]);
        }
    }
    let sup = expected.iter().map(|x| x.abs()).fold(0.0, f64::max);
    assert!((rep.sup("toda").unwrap() - sup).abs() < 1e-13 * sup);
}

#[test]
fn bracket_and_dual_forms_agree() {
    let ctx = a2();
    let rs = vec![
        vacuum_coefficients(&ctx).unwrap(),
        vec![Complex64::new(0.3, 0.1), Complex64::new(-1.2, 0.4), Complex64::new(0.7, -0.9)],
        vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(2.0, 0.0)],
    ];
    for r in rs {
        let data = CyclicData::new(&ctx, r).unwrap();
        let field = TodaField::from_fn(&ctx, 6, 6, 0.1, |x, y| cv(&[(3.0 * x).sin() - y, x * y + 0.2]));
        let rep = toda_bracket_form(&ctx, &field, &data);
        assert!(rep.sup("bracket_vs_dual").unwrap() < 1e-13);
        assert!(rep.sup("bracket_off_cartan").unwrap() < 1e-13);
    }
    let data = vacuum_data(&ctx);
    let b = toda_rhs_bracket(&ctx, &data, &cv(&[0.0, 0.0]));
    assert!(b.max_abs() < 1e-15);
}

#[test]
fn bracket_form_other_real_forms() {
    for (s, n) in [(Series::A, 3), (Series::D, 4), (Series::C, 3)] {
        let alg = crate::chevalley::ChevalleyAlgebra::from_type(s, n).unwrap();
        let count = crate::involution::DiagramInvolution::all(&alg.rs).len();
        for id in 0..count {
            let ctx = FlowContext::from_algebra(alg.clone(), id).unwrap();
            let r: Vec<Complex64> = (0..=n).map(|j| Complex64::new(1.0 + j as f64 * 0.1, 0.3 - j as f64 * 0.2)).collect();
            let data = CyclicData::new(&ctx, r).unwrap();
            let field = TodaField::from_fn(&ctx, 3, 3, 0.2, |x, y| cv(&(0..n).map(|l| x - 0.5 * y * l as f64).collect::<Vec<_>>()));
            assert!(toda_bracket_form(&ctx, &field, &data).sup("bracket_vs_dual").unwrap() < 1e-12, "{s}{n} form {id}");
        }
    }
}

#[test]
fn vacuum_frame_is_flat() {
    let ctx = a2();
    let field = TodaField::constant(&ctx, cv(&[0.0, 0.0]), 10, 10, 0.1);
    let rep = toda_frame_form(&ctx, &field, &vacuum_data(&ctx)).unwrap();
    assert!(rep.sup("frame_mc").unwrap() < 1e-13);
}

#[test]
fn frame_form_rejects_non_real_field() {
    let ctx = a2();
    let field = TodaField::from_fn(&ctx, 10, 10, 0.1, |x, _| CartanVector(vec![Complex64::new(0.0, x), Complex64::new(0.0, 0.0)]));
    assert!(field.reality_defect(&ctx) > 0.1);
    assert!(matches!(toda_frame_form(&ctx, &field, &vacuum_data(&ctx)), Err(Error::Precondition(_))));
}

#[test]
fn normalization_cases() {
    let ctx = a2();
    let data = CyclicData::new(&ctx, vec![Complex64::new(0.5, 0.1), Complex64::new(2.0, 0.0), Complex64::new(-1.0, 0.5)]).unwrap();
    let mut c = vec![data.r.clone(); 9];
    let rep = normalization_check(&ctx, &data, &c).unwrap();
    assert_eq!((rep.spread, rep.equality_defect, rep.noncyclic_nodes), (0.0, 0.0, 0));
    for x in c[4].iter_mut() {
        *x *= 2.0;
    }
    assert!(normalization_check(&ctx, &data, &c).unwrap().spread > 1.0);
    c[5][1] = Complex64::new(0.0, 0.0);
    let rep = normalization_check(&ctx, &data, &c).unwrap();
    assert_eq!(rep.noncyclic_nodes, 1);
    assert!(rep.values[5].is_none());
}

#[test]
fn vacuum_reconstruction_is_zero() {
    let ctx = a2();
    let out = integrate_flow(&ctx, &FlowSpec::new(vacuum_loop(&ctx, 4).unwrap(), 0.2, 0.2, 0.02)).unwrap();
    for rule in [PathRule::Trapezoid, PathRule::Hermite] {
        let rec = reconstruct_omega(&ctx, &out.grid, rule).unwrap();
        assert!(rec.field.omega.data().iter().all(|c| c.norm() < 1e-15));
        assert!(rec.loop_defect < 1e-15);
    }
}

#[test]
fn reconstruction_rejects_off_grading_data() {
    let ctx = a2();
    let out = integrate_flow(&ctx, &FlowSpec::new(random_real_loop(&ctx, 4, 0.25, 1).unwrap(), 0.1, 0.1, 0.02)).unwrap();
    let mut g = out.grid.clone();
    let mut xi = g.loop_at(1, 1);
    xi.coeff_mut(3).coeffs[ctx.alg.rank()] = Complex64::new(0.1, 0.0);
    g.set_loop(1, 1, &xi);
    assert!(matches!(reconstruct_omega(&ctx, &g, PathRule::Trapezoid), Err(Error::Precondition(_))));
}

#[test]
fn reconstructed_field_is_imaginary_and_periods_are_reported() {
    let ctx = a2();
    let out = integrate_flow(&ctx, &FlowSpec::new(random_real_loop(&ctx, 4, 0.25, 5).unwrap(), 0.2, 0.2, 0.02)).unwrap();
    let rec = reconstruct_omega(&ctx, &out.grid, PathRule::Hermite).unwrap();
    assert!(rec.reality_defect < 1e-12);
    assert!(rec.field.reality_defect(&ctx) < 1e-15);
    let p = period_defect(&ctx, &rec.field, 5, 5).unwrap();
    assert!(p.omega_z > 0.0 && p.exp_omega > 0.0);
    assert!(reconstruct_omega_checked(&ctx, &out.grid, PathRule::Trapezoid, 0.0).is_err());
}

#[test]
fn vacuum_recursion_is_trivial() {
    let ctx = a2();
    let data = vacuum_data(&ctx);
    let mut field = TodaField::constant(&ctx, cv(&[0.0, 0.0]), 8, 8, 0.1);
    field.omega_z = Some(field.omega.clone());
    let rec = formal_killing_recursion(&ctx, &field, &data, 3).unwrap();
    assert!(rec.flagged.is_empty());
    for level in &rec.x {
        for x in level.iter().flatten() {
            assert!(x.iter().all(|c| c.norm() == 0.0));
        }
    }
    let xi = rec.xi_at(4, 4).unwrap();
    assert!(xi.coeff(1).distance(&data.w) < 1e-14);
    for j in -2..=0 {
        assert!(xi.coeff(j).is_zero());
    }
    assert_eq!(rec.report.sup("lax_all"), Some(0.0));
}

#[test]
fn non_cyclic_recursion_is_flagged() {
    let ctx = a2();
    let data = CyclicData::new(&ctx, vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)]).unwrap();
    let mut field = TodaField::constant(&ctx, cv(&[0.0, 0.0]), 4, 4, 0.1);
    field.omega_z = Some(field.omega.clone());
    let rec = formal_killing_recursion(&ctx, &field, &data, 2).unwrap();
    assert_eq!(rec.flagged.len(), 25);
    assert!(rec.xi_tilde.iter().all(|x| x.is_none()));
}

#[test]
fn yl_shape() {
    let ctx = a2();
    let mut y = LoopElementBuilder::random(&ctx, 4);
    let (yl, od) = build_yl(&y, -3, 3, 1).unwrap();
    assert_eq!(yl.d(), 4);
    assert_eq!(yl.coeff(4), y.coeff(1));
    assert_eq!(od, y.coeff(-3).scale(&Complex64::new(0.5, 0.0)));
    assert_eq!(yl.coeff(0), &od);
    assert!(matches!(build_yl(&y, -3, 3, 2), Err(Error::Domain(_))));
    y.set(-3, ctx.alg.zero());
    let (yl2, od2) = build_yl(&y, -3, 3, 1).unwrap();
    assert!(od2.is_zero());
    for j in 1..=4 {
        assert_eq!(yl2.coeff(j), y.coeff(j - 3));
    }
}

struct LoopElementBuilder;

impl LoopElementBuilder {
    fn random(ctx: &FlowContext, d: usize) -> crate::coxeter::LoopElement {
        let mut y = crate::coxeter::LoopElement::zero(d, ctx.dim());
        for j in -(d as i64)..=1 {
            let mut e = ctx.alg.zero();
            for i in ctx.sigma.graded_basis(j) {
                e.coeffs[i] = Complex64::new(0.1 * i as f64 + j as f64, 0.5);
            }
            y.set(j, e);
        }
        y
    }
}

#[test]
fn vacuum_jacobi_residual_vanishes_and_random_y_does_not() {
    let ctx = a2();
    let data = vacuum_data(&ctx);
    let mut field = TodaField::constant(&ctx, cv(&[0.0, 0.0]), 12, 12, 0.1);
    field.omega_z = Some(field.omega.clone());
    let rec = formal_killing_recursion(&ctx, &field, &data, 4).unwrap();
    let (yg, og) = build_yl_grid(&ctx, &rec, 1).unwrap();
    let lam = crate::laxflow::unit_circle_samples(4);
    let rep = jacobi_residual(&ctx, &yg, &og, &field, &data, &lam, 4).unwrap();
    assert!(rep.rows.iter().all(|r| r.sup_residual < 1e-13));

    let mut noisy = yg.clone();
    for iy in 0..=12 {
        for ix in 0..=12 {
            let mut y = LoopElementBuilder::random(&ctx, 4);
            y.coeff_mut(1).coeffs[3] += Complex64::new((ix * iy) as f64 * 0.01, 0.0);
            noisy.set_loop(ix, iy, &y);
        }
    }
    let rep = jacobi_residual(&ctx, &noisy, &og, &field, &data, &lam, 4).unwrap();
    assert!(rep.sup("jacobi1").unwrap() > 1e-2);
}

#[test]
fn flow_grid_recursion_and_jacobi_fields() {
    // coarse grid: the deepest recursion levels are dominated by rounding at fine steps
    let ctx = a2();
    let xi = random_real_loop(&ctx, 4, 0.25, 7).unwrap();
    let data = CyclicData::from_element(&ctx, xi.coeff(4)).unwrap();
    let out = integrate_flow(&ctx, &FlowSpec::new(xi, 0.6, 0.6, 0.02)).unwrap();
    let rec = reconstruct_omega(&ctx, &out.grid, PathRule::Hermite).unwrap();
    let r = formal_killing_recursion(&ctx, &rec.field, &data, 4).unwrap();
    assert!(r.report.sup("top_vs_adw").unwrap() < 1e-14);
    assert!(r.report.sup("lax_nonneg").unwrap() < 1e-8);
    let (yg, og) = build_yl_grid(&ctx, &r, 1).unwrap();
    let lam = crate::laxflow::unit_circle_samples(4);
    let j = jacobi_residual(&ctx, &yg, &og, &rec.field, &data, &lam, 8).unwrap();
    let lax = r.report.sup("lax_all").unwrap();
    assert!(j.sup("jacobi1").unwrap() <= 2.0 * lax);
    assert!(j.sup("jacobi2").unwrap() <= 2.0 * lax);
}
