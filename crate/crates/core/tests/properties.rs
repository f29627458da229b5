use clustercc_core::cone::{
    kernel_cone_trivial, matrix_conditions_report, order_compare, KernelConeCertificate, Order,
};
use clustercc_core::fixtures::qp_zoo;
use clustercc_core::linalg::{parse_rat, rat, Rat, RatMatrix};
use clustercc_core::qp::reduce::mutate_qp;
use clustercc_core::surface::{build_nice_triangulation, MarkedSurface};
use num_traits::{Signed, Zero};
use proptest::prelude::*;

fn small_matrix(max_rows: usize, max_cols: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1..=max_rows, 1..=max_cols)
        .prop_flat_map(|(r, c)| prop::collection::vec(prop::collection::vec(-4i64..=4, c), r))
}

fn skew(max_n: usize, max_entry: i64) -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1..=max_n).prop_flat_map(move |n| {
        prop::collection::vec(-max_entry..=max_entry, n * (n - 1) / 2).prop_map(move |upper| {
            let mut b = vec![vec![0; n]; n];
            let mut it = upper.into_iter();
            for i in 0..n {
                for j in i + 1..n {
                    let v = it.next().unwrap();
                    b[i][j] = v;
                    b[j][i] = -v;
                }
            }
            b
        })
    })
}

/// Some nonzero vector in `{0..=bound}^n` lies in `Ker(B)`.
fn brute_kernel_hit(b: &[Vec<i64>], bound: i64) -> bool {
    let n = b.len();
    let mut v = vec![0i64; n];
    loop {
        let mut k = 0;
        while k < n && v[k] == bound {
            v[k] = 0;
            k += 1;
        }
        if k == n {
            return false;
        }
        v[k] += 1;
        if b.iter()
            .all(|row| row.iter().zip(&v).map(|(x, y)| x * y).sum::<i64>() == 0)
        {
            return true;
        }
    }
}

fn mat_vec(b: &[Vec<i64>], v: &[Rat]) -> Vec<Rat> {
    b.iter()
        .map(|row| row.iter().zip(v).map(|(x, y)| rat(*x) * y).sum())
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rref_is_idempotent(rows in small_matrix(5, 5)) {
        let a = RatMatrix::from_i64(&rows);
        let r = a.rref();
        let rr = r.r.rref();
        prop_assert_eq!(&rr.r, &r.r);
        prop_assert_eq!(rr.rank, r.rank);
        prop_assert_eq!(a.transpose().rank(), r.rank);
    }

    #[test]
    fn kernel_has_full_dimension(rows in small_matrix(5, 5)) {
        let a = RatMatrix::from_i64(&rows);
        let ker = a.kernel_rational();
        prop_assert_eq!(ker.len(), a.ncols() - a.rank());
        for v in &ker {
            prop_assert!(a.mul_vec(v).iter().all(Zero::is_zero));
        }
        if !ker.is_empty() {
            prop_assert_eq!(RatMatrix::from_cols(&ker, a.ncols()).rank(), ker.len());
        }
    }

    #[test]
    fn kernel_cone_certificates(b in skew(4, 3)) {
        let r = kernel_cone_trivial(&b).unwrap();
        match &r.certificate {
            KernelConeCertificate::NonnegativeKernelVector { vector } => {
                prop_assert!(!r.trivial);
                let v: Vec<Rat> = vector.iter().map(|s| parse_rat(s).unwrap()).collect();
                prop_assert!(v.iter().all(|x| !x.is_negative()) && v.iter().any(|x| !x.is_zero()));
                prop_assert!(mat_vec(&b, &v).iter().all(Zero::is_zero));
            }
            KernelConeCertificate::PositiveImage { y, image } => {
                prop_assert!(r.trivial);
                let y: Vec<Rat> = y.iter().map(|s| parse_rat(s).unwrap()).collect();
                let image: Vec<Rat> = image.iter().map(|s| parse_rat(s).unwrap()).collect();
                prop_assert_eq!(&mat_vec(&b, &y), &image);
                prop_assert!(image.iter().all(|x| x.is_positive()));
            }
        }
        if brute_kernel_hit(&b, 5) {
            prop_assert!(!r.trivial);
        }
    }

    #[test]
    fn conditions_implication_chain(b in skew(5, 3)) {
        let r = matrix_conditions_report(&b).unwrap();
        prop_assert!(r.implications_hold);
        if r.full_rank {
            prop_assert!(r.column_condition != Some(false));
        }
        if r.positive_image {
            prop_assert!(r.kernel_cone_rational);
        }
        prop_assert_eq!(r.positive_image, r.kernel_cone_rational);
        if r.kernel_cone_rational {
            prop_assert!(r.kernel_cone_integer);
        }
    }

    #[test]
    fn order_is_antisymmetric(
        b in skew(3, 2),
        a in prop::collection::vec(-3i64..=3, 3),
        c in prop::collection::vec(-3i64..=3, 3),
    ) {
        prop_assume!(kernel_cone_trivial(&b).unwrap().trivial);
        let n = b.len();
        let (a, c) = (&a[..n], &c[..n]);
        let fwd = order_compare(a, c, &b, 6).unwrap();
        let back = order_compare(c, a, &b, 6).unwrap();
        let mirrored = match fwd {
            Order::Less => Order::Greater,
            Order::Greater => Order::Less,
            o => o,
        };
        prop_assert_eq!(back, mirrored);
        prop_assert_eq!(fwd == Order::Equal, a == c);
    }

    #[test]
    fn derivative_paths_close_the_arrow(i in 0usize..13) {
        let zoo = qp_zoo();
        let (_, qp) = &zoo[i % zoo.len()];
        for a in 0..qp.quiver.arrows.len() {
            let want = (qp.quiver.target(a), qp.quiver.source(a));
            for path in qp.cyclic_derivative(a).keys() {
                if path.is_empty() {
                    prop_assert_eq!(want.0, want.1);
                } else {
                    prop_assert_eq!(qp.quiver.path_endpoints(path), Some(want));
                }
            }
        }
        // Restriction commutes with taking derivatives for surviving arrows.
        let res = qp.restrict();
        for ra in 0..res.quiver.arrows.len() {
            let a = qp.quiver.arrow_index(&res.quiver.arrows[ra].id).unwrap();
            let map = |x: usize| res.quiver.arrow_index(&qp.quiver.arrows[x].id);
            let want: std::collections::BTreeMap<Vec<usize>, Rat> = qp
                .cyclic_derivative(a)
                .into_iter()
                .filter_map(|(p, c)| p.iter().map(|&x| map(x)).collect::<Option<Vec<_>>>().map(|q| (q, c)))
                .collect();
            prop_assert_eq!(res.cyclic_derivative(ra), want);
        }
    }

    #[test]
    fn qp_mutation_follows_matrix_mutation(i in 0usize..13, ks in prop::collection::vec(0usize..4, 1..4)) {
        let zoo = qp_zoo();
        let (_, start) = &zoo[i % zoo.len()];
        let mut qp = start.clone();
        for k in ks {
            let k = k % qp.n();
            let Ok(next) = mutate_qp(&qp, k) else { break };
            let next = next.qp().clone();
            let b = qp.quiver.b_matrix().mutate(k).unwrap();
            prop_assert_eq!(next.quiver.b_matrix(), b.clone());
            let back = mutate_qp(&next, k);
            if let Ok(back) = back {
                prop_assert_eq!(back.qp().quiver.b_matrix(), qp.quiver.b_matrix());
            }
            let two_acyclic = (0..next.total()).all(|v| !next.quiver.has_two_cycle_at(v));
            if !two_acyclic {
                break;
            }
            qp = next;
        }
    }

    #[test]
    fn surface_flips_follow_mutation(
        boundary in prop::collection::vec(1usize..=3, 2..=3),
        punctures in 0usize..=2,
        flips in prop::collection::vec(0usize..64, 0..8),
    ) {
        let s = MarkedSurface { genus: 0, boundary, punctures };
        let nice = build_nice_triangulation(&s, None).unwrap();
        let mut t = nice.sigma.clone();
        let b = t.b_matrix();
        prop_assert!(b.iter().enumerate().all(|(i, r)| r.iter().enumerate().all(|(j, x)| *x == -b[j][i])));
        prop_assert!(kernel_cone_trivial(&b).unwrap().trivial);
        for f in flips {
            let k = f % t.n();
            let Ok(next) = t.flip(k) else { continue };
            let want = t.exchange_matrix().mutate(k).unwrap();
            prop_assert_eq!(next.exchange_matrix(), want);
            prop_assert!(next.validate().is_ok());
            t = next;
        }
    }
}
