//! Named example data shared by tests, the CLI and the benches.

use crate::linalg::{rat, RatMatrix};
use crate::qp::{Arrow, Potential, Quiver, DEFAULT_TRUNCATION, QP};
use crate::rep::DecoratedRep;

/// Arrow with 1-based endpoints.
pub fn arrow(id: &str, s: usize, t: usize) -> Arrow {
    Arrow {
        id: id.into(),
        source: s - 1,
        target: t - 1,
    }
}

fn qp(n: usize, m: usize, arrows: Vec<Arrow>, terms: Vec<(i64, Vec<usize>)>) -> QP {
    let q = Quiver::new(n, m, arrows).expect("fixture quiver");
    let s = Potential::from_terms(terms.into_iter().map(|(c, p)| (rat(c), p)));
    QP::new(q, s, DEFAULT_TRUNCATION).expect("fixture QP")
}

/// Vertices 1..3 mutable, 4 frozen; alpha: 2->1, beta: 3->2, gamma: 1->3,
/// delta: 4->2, epsilon: 1->4; S = alpha beta gamma - alpha delta epsilon.
pub fn two_triangles() -> QP {
    qp(
        3,
        1,
        vec![
            arrow("α", 2, 1),
            arrow("β", 3, 2),
            arrow("γ", 1, 3),
            arrow("δ", 4, 2),
            arrow("ε", 1, 4),
        ],
        vec![(1, vec![2, 1, 0]), (-1, vec![4, 3, 0])],
    )
}

/// The oriented 3-cycle on mutable vertices with S = alpha beta gamma.
pub fn three_cycle() -> QP {
    qp(
        3,
        0,
        vec![arrow("α", 2, 1), arrow("β", 3, 2), arrow("γ", 1, 3)],
        vec![(1, vec![2, 1, 0])],
    )
}

/// The 3-cycle with vertex 3 frozen, with potential alpha beta gamma or 0.
pub fn frozen_triangle(with_potential: bool) -> QP {
    let terms = if with_potential {
        vec![(1, vec![2, 1, 0])]
    } else {
        vec![]
    };
    qp(
        2,
        1,
        vec![arrow("α", 2, 1), arrow("β", 3, 2), arrow("γ", 1, 3)],
        terms,
    )
}

/// C <- C along alpha: 2 -> 1, over `frozen_triangle`.
pub fn frozen_triangle_module(qp: &QP) -> DecoratedRep {
    let mut m = DecoratedRep::with_dims(qp, vec![1, 1, 0], vec![0; 3]);
    m.mats[0] = RatMatrix::identity(1);
    m
}

/// S(1) plus the injective hull of S(2) over the restricted 3-cycle, as a
/// representation of `target` (any QP containing the arrows alpha, beta).
pub fn simple_plus_injective(target: &QP) -> DecoratedRep {
    let total = target.total();
    let mut dims = vec![0; total];
    dims[0] = 1;
    dims[1] = 1;
    dims[2] = 1;
    let mut m = DecoratedRep::with_dims(target, dims, vec![0; total]);
    let beta = target.quiver.arrow_index("β").expect("beta present");
    m.mats[beta] = RatMatrix::identity(1);
    m
}

pub fn markov_matrix() -> Vec<Vec<i64>> {
    vec![vec![0, 2, -2], vec![-2, 0, 2], vec![2, -2, 0]]
}

/// Signed adjacency matrices of the annulus with 1 + c marked points, c = 1..4.
pub fn annulus_matrices() -> Vec<Vec<Vec<i64>>> {
    vec![
        vec![vec![0, 2], vec![-2, 0]],
        vec![vec![0, 1, 1], vec![-1, 0, -1], vec![-1, 1, 0]],
        vec![
            vec![0, 2, -1, 0],
            vec![-2, 0, 1, 0],
            vec![1, -1, 0, 1],
            vec![0, 0, -1, 0],
        ],
        vec![
            vec![0, 2, -1, 0, 0],
            vec![-2, 0, 1, 0, 0],
            vec![1, -1, 0, -1, 0],
            vec![0, 0, 1, 0, 1],
            vec![0, 0, 0, -1, 0],
        ],
    ]
}

/// Small QPs with 2-acyclic quivers used by the property suite.
pub fn qp_zoo() -> Vec<(String, QP)> {
    let mut out = vec![
        ("A2".to_string(), qp(2, 0, vec![arrow("a", 2, 1)], vec![])),
        (
            "A3 linear".to_string(),
            qp(3, 0, vec![arrow("a", 2, 1), arrow("b", 3, 2)], vec![]),
        ),
        (
            "A3 alternating".to_string(),
            qp(3, 0, vec![arrow("a", 2, 1), arrow("b", 2, 3)], vec![]),
        ),
        ("3-cycle".to_string(), three_cycle()),
        ("two triangles".to_string(), two_triangles()),
        ("frozen triangle".to_string(), frozen_triangle(true)),
        ("frozen triangle, S = 0".to_string(), frozen_triangle(false)),
        (
            "A4 linear".to_string(),
            qp(
                4,
                0,
                vec![arrow("a", 2, 1), arrow("b", 3, 2), arrow("c", 4, 3)],
                vec![],
            ),
        ),
        (
            "D4".to_string(),
            qp(
                4,
                0,
                vec![arrow("a", 1, 2), arrow("b", 3, 2), arrow("c", 4, 2)],
                vec![],
            ),
        ),
        (
            "A2 with frozen".to_string(),
            qp(
                2,
                2,
                vec![arrow("a", 2, 1), arrow("f", 1, 3), arrow("g", 4, 2)],
                vec![],
            ),
        ),
        (
            "square with diagonal".to_string(),
            qp(
                4,
                0,
                vec![
                    arrow("a", 2, 1),
                    arrow("b", 3, 2),
                    arrow("c", 1, 3),
                    arrow("d", 4, 3),
                    arrow("e", 1, 4),
                ],
                vec![(1, vec![2, 1, 0])],
            ),
        ),
        (
            "two 3-cycles".to_string(),
            qp(
                4,
                0,
                vec![
                    arrow("a", 2, 1),
                    arrow("b", 3, 2),
                    arrow("c", 1, 3),
                    arrow("d", 4, 2),
                    arrow("e", 1, 4),
                ],
                vec![(1, vec![2, 1, 0]), (-1, vec![4, 3, 0])],
            ),
        ),
    ];
    out.push(("annulus (1,2)".to_string(), annulus_gentle()));
    out
}

/// Gentle QP of the annulus with one and two boundary marked points.
pub fn annulus_gentle() -> QP {
    let t =
        crate::surface::refine_boundary(&crate::surface::annulus_base(), 1, 2).expect("annulus");
    crate::surface::gentle_qp(&t, DEFAULT_TRUNCATION).expect("gentle QP")
}
