use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use clustercc_core::cone::{kernel_cone_trivial, matrix_conditions_report};
use clustercc_core::fixtures::{annulus_matrices, simple_plus_injective, two_triangles};
use clustercc_core::linalg::{int_matrix, rref};
use clustercc_core::qp::mutate_qp;
use clustercc_core::rep::{cc_function, mutate_rep, ChiMethod, DecoratedRep};
use clustercc_core::seed::{cluster_variable, principal_matrix};
use clustercc_core::surface::{build_nice_triangulation, MarkedSurface};

fn linalg(c: &mut Criterion) {
    let rows: Vec<Vec<i64>> = (0..12)
        .map(|i| {
            (0..12)
                .map(|j| ((i * 7 + j * 13) % 11) as i64 - 5)
                .collect()
        })
        .collect();
    let a = int_matrix(&rows);
    c.bench_function("rref 12x12", |b| b.iter(|| rref(black_box(&a))));
    let annuli = annulus_matrices();
    c.bench_function("kernel cone, annulus matrices", |b| {
        b.iter(|| {
            annuli
                .iter()
                .filter(|m| kernel_cone_trivial(black_box(m)).unwrap().trivial)
                .count()
        })
    });
    c.bench_function("matrix conditions, 5x5 annulus", |b| {
        b.iter(|| matrix_conditions_report(black_box(&annuli[3])).unwrap())
    });
}

fn seeds(c: &mut Criterion) {
    let a4 = vec![
        vec![0, 1, 0, 0],
        vec![-1, 0, 1, 0],
        vec![0, -1, 0, 1],
        vec![0, 0, -1, 0],
    ];
    let bt = principal_matrix(&a4).unwrap();
    c.bench_function("cluster variable, A4 principal, 6 mutations", |b| {
        b.iter(|| cluster_variable(black_box(&bt), &[0, 1, 2, 3, 0, 1], 1).unwrap())
    });
}

fn qps(c: &mut Criterion) {
    let qp = two_triangles();
    c.bench_function("QP mutation, two triangles", |b| {
        b.iter(|| mutate_qp(black_box(&qp), 0).unwrap())
    });
    let m = simple_plus_injective(&qp);
    c.bench_function("rep mutation, two triangles", |b| {
        b.iter(|| mutate_rep(black_box(&m), &qp, 1).unwrap())
    });
    let s2 = DecoratedRep::simple(&qp, 1);
    for (name, method) in [
        ("fixed point", ChiMethod::Fixedpoint),
        ("point count", ChiMethod::Pointcount),
    ] {
        c.bench_function(&format!("CC function, {name}"), |b| {
            b.iter(|| cc_function(black_box(&m), &qp, method).unwrap())
        });
    }
    c.bench_function("CC function, simple", |b| {
        b.iter(|| cc_function(black_box(&s2), &qp, ChiMethod::Auto).unwrap())
    });
}

fn surfaces(c: &mut Criterion) {
    let mut g = c.benchmark_group("nice triangulation");
    g.sample_size(10);
    for boundary in [vec![1, 3], vec![2, 2], vec![1, 1, 2]] {
        let s = MarkedSurface {
            genus: 0,
            boundary: boundary.clone(),
            punctures: 1,
        };
        g.bench_function(format!("{boundary:?}, 1 puncture"), |b| {
            b.iter(|| build_nice_triangulation(black_box(&s), None).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, linalg, seeds, qps, surfaces);
criterion_main!(benches);
