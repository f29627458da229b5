//! One PASS/FAIL line per primary acceptance criterion.

use std::time::{Duration, Instant};

use clustercc_core::cone::kernel_cone_trivial;
use clustercc_core::fixtures::{
    annulus_matrices, frozen_triangle, frozen_triangle_module, markov_matrix,
    simple_plus_injective, two_triangles,
};
use clustercc_core::laurent::LaurentPoly;
use clustercc_core::rep::{cc_function, g_vector, ChiMethod, DecoratedRep};
use clustercc_core::seed::{
    cluster_variable, enumerate_cluster_variables, specialization_phi, ExchangeMatrix,
};
use clustercc_core::surface::{
    annulus_base, build_nice_triangulation, refine_boundary, MarkedSurface,
};
use clustercc_core::verify::{run_property_suite, SuiteConfig};

type Check = Result<String, String>;

fn lp(n: usize, s: &str) -> LaurentPoly {
    LaurentPoly::parse(n, s).unwrap()
}

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn timed(limit: Duration, f: impl FnOnce() -> Check) -> Check {
    let start = Instant::now();
    let out = f()?;
    let took = start.elapsed();
    ensure(took < limit, format!("took {took:?}, limit {limit:?}"))?;
    Ok(format!("{out} ({took:.2?})"))
}

fn golden_g_vector() -> Check {
    timed(Duration::from_secs(1), || {
        let ext = two_triangles();
        let res = ext.restrict();
        let s2 = DecoratedRep::simple(&ext, 1);
        let g_ext = g_vector(&s2, &ext);
        let g = g_vector(&s2.transport(&ext, &res).map_err(|e| e.to_string())?, &res);
        ensure(g == vec![0, -1, 1], format!("restricted g = {g:?}"))?;
        ensure(
            g_ext == vec![0, -1, 1, 1],
            format!("extended g = {g_ext:?}"),
        )?;
        Ok(format!("g = {g:?}, extended g = {g_ext:?}"))
    })
}

fn golden_cc() -> Check {
    let ext = two_triangles();
    let res = ext.restrict();
    let s2 = DecoratedRep::simple(&ext, 1);
    let cc_ext = cc_function(&s2, &ext, ChiMethod::Auto).map_err(|e| e.to_string())?;
    let cc_res = cc_function(&s2.transport(&ext, &res).unwrap(), &res, ChiMethod::Auto)
        .map_err(|e| e.to_string())?;
    let want_ext = &lp(4, "x2^-1 x3 x4") * &lp(4, "1 + x1 x3^-1 x4^-1");
    let want_res = &lp(3, "x2^-1 x3") * &lp(3, "1 + x1 x3^-1");
    ensure(cc_ext == want_ext, format!("extended cc = {cc_ext}"))?;
    ensure(cc_res == want_res, format!("restricted cc = {cc_res}"))?;
    Ok(format!("{cc_ext}; {cc_res}"))
}

fn section_pair() -> Check {
    let bt = ExchangeMatrix::new(2, 1, vec![vec![0, 1], vec![-1, 0], vec![1, -1]]).unwrap();
    let variables = enumerate_cluster_variables(&bt, 6).map_err(|e| e.to_string())?;
    let with = frozen_triangle(true);
    let without = frozen_triangle(false);
    ensure(
        with.quiver.b_matrix() == bt,
        "quiver does not carry the exchange matrix",
    )?;
    let cc1 = cc_function(&frozen_triangle_module(&with), &with, ChiMethod::Auto)
        .map_err(|e| e.to_string())?;
    let cc0 = cc_function(&frozen_triangle_module(&without), &without, ChiMethod::Auto)
        .map_err(|e| e.to_string())?;
    let f = lp(3, "1 + x2^-1 x3 + x1 x2^-1");
    ensure(
        cc1 == &lp(3, "x1^-1") * &f,
        format!("cc with potential = {cc1}"),
    )?;
    ensure(
        cc0 == &lp(3, "x1^-1 x3") * &f,
        format!("cc without potential = {cc0}"),
    )?;
    let hit = variables.values().find(|(_, _, v)| *v == cc1);
    let (seq, j, _) =
        hit.ok_or_else(|| format!("{cc1} is not among {} cluster variables", variables.len()))?;
    ensure(
        variables.values().all(|(_, _, v)| *v != cc0),
        format!("{cc0} is a cluster variable"),
    )?;
    // The single mutation at vertex 1 is recorded for comparison only.
    let mu1 = cluster_variable(&bt, &[0], 0).map_err(|e| e.to_string())?;
    println!(
        "  info: cluster variable after mutating at 1, entry 1: {mu1} (equal to cc: {})",
        mu1 == cc1
    );
    let seq1: Vec<usize> = seq.iter().map(|k| k + 1).collect();
    Ok(format!(
        "cc = entry {} after mutations {seq1:?}; potential 0 misses all {} variables up to depth 6",
        j + 1,
        variables.len()
    ))
}

fn specialization() -> Check {
    let ext = two_triangles();
    let prin = ext.principal();
    let n_ext = simple_plus_injective(&ext);
    let n_prin = simple_plus_injective(&prin);
    let cc_prin = cc_function(&n_prin, &prin, ChiMethod::Auto).map_err(|e| e.to_string())?;
    let cc_ext = cc_function(&n_ext, &ext, ChiMethod::Auto).map_err(|e| e.to_string())?;
    // Variables x1..x3, y1..y3 for the principal extension.
    let want_prin = lp(
        6,
        "x1^-1 + x1^-1 x2^-1 x3 x4 + x2^-1 x4 x5 + x3^-1 x5 + x1^-1 x2 x3^-1 x5 x6 + x1^-1 x4 x5 x6",
    );
    let want_ext = lp(
        4,
        "x1^-1 x4 + x1^-1 x2^-1 x3 x4^2 + x2^-1 x4 + x3^-1 + x1^-1 x2 x3^-1 + x1^-1 x4",
    );
    ensure(cc_prin == want_prin, format!("principal cc = {cc_prin}"))?;
    ensure(cc_ext == want_ext, format!("cc = {cc_ext}"))?;
    let phi = specialization_phi(&ext.quiver.b_matrix());
    let lhs = cc_prin.substitute(&phi).map_err(|e| e.to_string())?;
    let rhs = &lp(4, "x4^-1") * &cc_ext;
    ensure(lhs == rhs, format!("phi(cc) = {lhs}, expected {rhs}"))?;
    Ok(format!("phi(cc_prin) = {lhs}"))
}

fn annuli() -> Check {
    let mats = annulus_matrices();
    for (c, want) in (1..=4).zip(&mats) {
        let t = refine_boundary(&annulus_base(), 1, c).map_err(|e| e.to_string())?;
        ensure(
            t.b_matrix() == *want,
            format!("c = {c}: {:?}", t.b_matrix()),
        )?;
    }
    let cert = |c: usize| -> Result<Vec<(String, String)>, String> {
        let s = MarkedSurface {
            genus: 0,
            boundary: vec![1, c],
            punctures: 0,
        };
        let nice = build_nice_triangulation(&s, None).map_err(|e| e.to_string())?;
        Ok(nice.certificate.expressions[0].terms.clone())
    };
    let pairs = |v: &[(&str, &str)]| {
        v.iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect::<Vec<_>>()
    };
    ensure(
        cert(2)? == pairs(&[("a1", "1"), ("a2", "1")]),
        format!("column 3: {:?}", cert(2)?),
    )?;
    ensure(
        cert(4)? == pairs(&[("a1", "1/2"), ("a2", "1/2"), ("i2.1", "1")]),
        format!("column 5: {:?}", cert(4)?),
    )?;
    Ok("four matrices; b3 = b1 + b2; b5 = b3 + b1/2 + b2/2".into())
}

fn property_suite() -> Check {
    let report = run_property_suite(&SuiteConfig::default()).map_err(|e| e.to_string())?;
    for p in &report.properties {
        println!(
            "  ({}) {}: {} checked, {} skipped, {} failed",
            p.key,
            p.name,
            p.checked,
            p.skipped,
            p.failures.len()
        );
        for f in p.failures.iter().take(3) {
            println!("      {f}");
        }
    }
    ensure(
        report.representations >= 200,
        format!("only {} representations", report.representations),
    )?;
    ensure(report.qps >= 10, format!("only {} QPs", report.qps))?;
    ensure(report.passed(), "property failures")?;
    ensure(
        report.elapsed_ms < 600_000,
        format!("{} ms", report.elapsed_ms),
    )?;
    Ok(format!(
        "{} representations over {} QPs, {} triangulations, {} ms",
        report.representations, report.qps, report.triangulations, report.elapsed_ms
    ))
}

fn kernel_cone() -> Check {
    let surfaces = [
        (vec![1, 1], 0),
        (vec![1, 2], 0),
        (vec![1, 4], 0),
        (vec![2, 3], 2),
        (vec![1, 1, 2], 1),
        (vec![2, 2, 2, 2], 3),
    ];
    for (boundary, punctures) in surfaces {
        let s = MarkedSurface {
            genus: 0,
            boundary,
            punctures,
        };
        timed(Duration::from_secs(1), || {
            let nice = build_nice_triangulation(&s, None).map_err(|e| format!("{s:?}: {e}"))?;
            let r = kernel_cone_trivial(&nice.triangulation.b_matrix).map_err(|e| e.to_string())?;
            ensure(r.trivial, format!("{s:?}: nontrivial kernel cone"))?;
            Ok(String::new())
        })?;
    }
    timed(Duration::from_secs(1), || {
        let r = kernel_cone_trivial(&markov_matrix()).map_err(|e| e.to_string())?;
        ensure(
            !r.trivial && r.kernel_vector() == Some(vec![1, 1, 1]),
            format!("markov: {r:?}"),
        )?;
        Ok("markov certificate (1,1,1)".into())
    })
}

fn main() {
    let checks: Vec<(&str, fn() -> Check)> = vec![
        ("golden g-vector of S(2)", golden_g_vector),
        ("golden CC values of S(2)", golden_cc),
        (
            "potential vs zero potential: cluster variable hit and miss",
            section_pair,
        ),
        ("specialization of principal coefficients", specialization),
        ("annulus matrices and column certificates", annuli),
        ("randomized property suite", property_suite),
        ("kernel cone condition", kernel_cone),
    ];
    let mut failed = 0;
    for (name, f) in checks {
        match f() {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL {name}: {why}");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
