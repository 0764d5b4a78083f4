use serde_json::json;
use toda_core::coxeter::{is_cyclic, CoxeterAutomorphism};
use toda_core::laxflow::{cyclic_element, vacuum_coefficients, FlowContext};
use toda_core::involution::{certify_compatibility, DiagramInvolution, RealForm};
use toda_core::Root;

use crate::{AlgebraArgs, Outcome};

fn coeffs(r: &Root) -> String {
    r.coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" ")
}

pub fn info(args: &AlgebraArgs, json: bool) -> Outcome {
    let alg = args.build()?;
    let rs = &alg.rs;
    if json {
        println!("{}", serde_json::to_string_pretty(&rs.to_json())?);
        return Ok(());
    }
    println!("type {}{}", rs.series, rs.rank);
    println!("dimension {}", alg.dim());
    println!("roots {} ({} positive)", rs.roots().len(), rs.num_positive());
    println!("coxeter number {}", rs.coxeter_number);
    println!("marks {:?}", rs.extended_marks());
    println!("highest root {}", rs.highest_root());
    println!("cartan matrix");
    for row in &rs.cartan_matrix {
        println!("  {}", row.iter().map(|c| format!("{c:>3}")).collect::<String>());
    }
    Ok(())
}

pub fn constants(args: &AlgebraArgs, csv: bool) -> Outcome {
    let alg = args.build()?;
    let rows = alg.constant_rows();
    if csv {
        println!("alpha,beta,c");
        for (a, b, c) in rows {
            println!("{},{},{c}", coeffs(&a), coeffs(&b));
        }
    } else {
        for (a, b, c) in rows {
            println!("[{a}, {b}] = {c}");
        }
    }
    Ok(())
}

pub fn involutions(args: &AlgebraArgs, json: bool) -> Outcome {
    let alg = args.build()?;
    let sigma = CoxeterAutomorphism::new(&alg);
    let mut rows = Vec::new();
    for (id, pi) in DiagramInvolution::all(&alg.rs).iter().enumerate() {
        let rf = RealForm::new(&alg, id)?;
        let prop = certify_compatibility(&alg, &rf.theta.map, &sigma, &rf.conj);
        rows.push(json!({
            "id": id,
            "pi": pi.pi.0,
            "certificate": rf.certificate.kind(),
            "certificate_data": rf.certificate,
            "b_signs": rf.theta.signs,
            "b0": rf.theta.b0,
            "sign_search": rf.theta.search,
            "compatibility": prop,
            "real_dimension": rf.conj.fixed_real_dimension(&alg),
        }));
    }
    if json {
        println!("{}", serde_json::to_string_pretty(&rows)?);
    } else {
        println!("id  pi  certificate  b_signs  compatibility");
        for r in &rows {
            println!("{}  {}  {}  {}  {}", r["id"], r["pi"], r["certificate"].as_str().unwrap_or(""), r["b_signs"], r["compatibility"]);
        }
    }
    Ok(())
}

pub fn grading(args: &AlgebraArgs, real_form: usize, tol: f64) -> Outcome {
    if !(tol > 0.0) {
        return Err(anyhow::anyhow!("cyclic tolerance must be positive").into());
    }
    let alg = args.build()?;
    let sigma = CoxeterAutomorphism::new(&alg);
    println!("k {}", sigma.k);
    for (j, dim) in sigma.grading_dimensions().iter().enumerate() {
        println!("g_{j} {dim}");
    }
    let ctx = FlowContext::from_algebra(alg, real_form)?;
    match vacuum_coefficients(&ctx) {
        Ok(r) => {
            let w = cyclic_element(&ctx.alg, &r)?;
            println!("vacuum element cyclic {}", is_cyclic(&ctx.alg, &ctx.sigma, &w, tol)?);
        }
        Err(e) => println!("vacuum element unavailable: {e}"),
    }
    Ok(())
}
