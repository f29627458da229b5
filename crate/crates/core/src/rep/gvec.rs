//! g-vectors and the E-invariant.

use std::collections::HashMap;

use num_traits::Zero;
use serde::Serialize;

use super::mutation::triangle_maps;
use super::{check_truncation, hom::hom_dim, DecoratedRep};
use crate::error::Result;
use crate::linalg::{Rat, RatMatrix};
use crate::qp::QP;

/// g_k = dim ker gamma_k - d_k + v_k for every vertex (frozen ones included).
pub fn g_vector(rep: &DecoratedRep, qp: &QP) -> Vec<i64> {
    (0..qp.total())
        .map(|k| {
            let t = triangle_maps(rep, qp, k);
            let ker = t.gamma.ncols() - t.gamma.rank();
            ker as i64 - rep.dims[k] as i64 + rep.decoration[k] as i64
        })
        .collect()
}

/// Paths starting at `v` with fewer than `len` arrows, empty path first.
fn paths_from(qp: &QP, v: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    let mut frontier = vec![(vec![], v)];
    for _ in 1..len {
        let mut next = Vec::new();
        for (p, end) in &frontier {
            for b in qp.quiver.arrows_out_of(*end) {
                let mut np: Vec<usize> = p.clone();
                np.push(b);
                out.push(np.clone());
                next.push((np, qp.quiver.target(b)));
            }
        }
        frontier = next;
    }
    out
}

fn path_end(qp: &QP, start: usize, path: &[usize]) -> usize {
    path.last().map_or(start, |&a| qp.quiver.target(a))
}

/// dim Hom(rad P_k, M), with P_k the projective at k over the Jacobian
/// algebra truncated at path length L = dim M + 2. A morphism is the choice
/// of images m_b in M_t(b) of the arrows b out of k, subject to every linear
/// syzygy sum_b x_b b = 0 holding in P_k.
fn hom_from_radical(rep: &DecoratedRep, qp: &QP, k: usize) -> usize {
    let q = &qp.quiver;
    let len = rep.total_dim() + 2;
    let pk = paths_from(qp, k, len);
    let index: HashMap<&[usize], usize> = pk
        .iter()
        .enumerate()
        .map(|(i, p)| (p.as_slice(), i))
        .collect();
    // Relations w' . d_a S . w spanning the Jacobian ideal inside P_k.
    let mut relations: Vec<Vec<Rat>> = Vec::new();
    let derivs: Vec<_> = (0..q.arrows.len())
        .map(|a| qp.cyclic_derivative(a))
        .collect();
    for w in &pk {
        let e = path_end(qp, k, w);
        for (a, d) in derivs.iter().enumerate() {
            if d.is_empty() || q.target(a) != e {
                continue;
            }
            let sa = q.source(a);
            let min = d.keys().map(|p| p.len()).min().unwrap_or(0);
            if w.len() + min >= len {
                continue;
            }
            for tail in paths_from(qp, sa, len - w.len() - min) {
                let mut v = vec![Rat::zero(); pk.len()];
                let mut any = false;
                for (path, c) in d {
                    let full: Vec<usize> = w.iter().chain(path).chain(&tail).copied().collect();
                    if let Some(&i) = index.get(full.as_slice()) {
                        v[i] += c;
                        any = true;
                    }
                }
                if any {
                    relations.push(v);
                }
            }
        }
    }
    let quotient = if relations.is_empty() {
        RatMatrix::identity(pk.len())
    } else {
        RatMatrix::from_rows_with_cols(relations, pk.len())
            .transpose()
            .cokernel_projection()
    };
    // Generators: x_b ranges over paths from t(b) with fewer than len - 1 arrows.
    let outs = q.arrows_out_of(k);
    let mut src: Vec<(usize, Vec<usize>)> = Vec::new();
    for (j, &b) in outs.iter().enumerate() {
        for p in paths_from(qp, q.target(b), len - 1) {
            src.push((j, p));
        }
    }
    let mut phi = RatMatrix::zeros(pk.len(), src.len());
    for (c, (j, p)) in src.iter().enumerate() {
        let full: Vec<usize> = std::iter::once(outs[*j]).chain(p.iter().copied()).collect();
        if let Some(&i) = index.get(full.as_slice()) {
            phi.set(i, c, Rat::from_integer(1.into()));
        }
    }
    let syzygies = quotient.mul(&phi).kernel_rational();
    let offs: Vec<usize> = outs
        .iter()
        .scan(0, |s, &b| {
            let o = *s;
            *s += rep.dims[q.target(b)];
            Some(o)
        })
        .collect();
    let width: usize = outs.iter().map(|&b| rep.dims[q.target(b)]).sum();
    let mut rows: Vec<Vec<Rat>> = Vec::new();
    for x in &syzygies {
        let mut blocks: Vec<RatMatrix> = (0..q.total())
            .map(|v| RatMatrix::zeros(rep.dims[v], width))
            .collect();
        for (c, (j, p)) in src.iter().enumerate() {
            if x[c].is_zero() {
                continue;
            }
            let tb = q.target(outs[*j]);
            let end = path_end(qp, tb, p);
            let m = rep.eval_path(tb, p).scale(&x[c]);
            let mut cur = blocks[end].block(0, rep.dims[end], offs[*j], rep.dims[tb]);
            cur = cur.add(&m);
            blocks[end].set_block(0, offs[*j], &cur);
        }
        for b in blocks {
            rows.extend(b.to_rows());
        }
    }
    let rank = RatMatrix::from_rows_with_cols(rows, width).rank();
    width - rank
}

/// g_k = -hom(S_k, M) + ext^1(S_k, M) + v_k, with ext^1 read off the
/// sequence 0 -> rad P_k -> P_k -> S_k -> 0.
pub fn g_vector_via_resolution(rep: &DecoratedRep, qp: &QP) -> Result<Vec<i64>> {
    check_truncation(rep, qp)?;
    Ok((0..qp.total())
        .map(|k| {
            let dk = rep.dims[k] as i64;
            let socle = hom_dim(&DecoratedRep::simple(qp, k), rep, qp) as i64;
            let ext1 = hom_from_radical(rep, qp, k) as i64 - dk + socle;
            -socle + ext1 + rep.decoration[k] as i64
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct GVectorPair {
    pub kernel_route: Vec<i64>,
    pub resolution_route: Vec<i64>,
    pub agree: bool,
}

pub fn g_vector_pair(rep: &DecoratedRep, qp: &QP) -> Result<GVectorPair> {
    let kernel_route = g_vector(rep, qp);
    let resolution_route = g_vector_via_resolution(rep, qp)?;
    let agree = kernel_route == resolution_route;
    Ok(GVectorPair {
        kernel_route,
        resolution_route,
        agree,
    })
}

/// E(M, N) = hom(M, N) + sum over mutable i of d_i(M) g_i(N).
pub fn e_invariant_pair(m: &DecoratedRep, n: &DecoratedRep, qp: &QP) -> i64 {
    let g = g_vector(n, qp);
    let pairing: i64 = (0..qp.n()).map(|i| m.dims[i] as i64 * g[i]).sum();
    hom_dim(m, n, qp) as i64 + pairing
}

pub fn e_invariant(m: &DecoratedRep, qp: &QP) -> i64 {
    e_invariant_pair(m, m, qp)
}

#[cfg(test)]
mod tests {
    use super::super::tests::one;
    use super::*;
    use crate::qp::tests::{three_cycle, two_triangles};

    #[test]
    fn simple_two_on_two_triangles() {
        let qp = two_triangles();
        let s2 = DecoratedRep::simple(&qp, 1);
        assert_eq!(g_vector(&s2, &qp), vec![0, -1, 1, 1]);
        let r = qp.restrict();
        let s2r = s2.transport(&qp, &r).unwrap();
        assert_eq!(g_vector(&s2r, &r), vec![0, -1, 1]);
        let pair = g_vector_pair(&s2, &qp).unwrap();
        assert!(pair.agree, "{pair:?}");
        assert_eq!(e_invariant(&s2, &qp), 0);
    }

    #[test]
    fn routes_agree_on_three_cycle_modules() {
        let qp = three_cycle();
        let mut m = DecoratedRep::with_dims(&qp, vec![1, 1, 0], vec![0, 0, 1]);
        m.mats[0] = one(1);
        let pair = g_vector_pair(&m, &qp).unwrap();
        assert!(pair.agree, "{pair:?}");
        for k in 0..3 {
            let s = DecoratedRep::simple(&qp, k);
            assert!(g_vector_pair(&s, &qp).unwrap().agree);
            let neg = DecoratedRep::negative_simple(&qp, k);
            let mut e = vec![0; 3];
            e[k] = 1;
            assert_eq!(g_vector(&neg, &qp), e);
        }
    }

    #[test]
    fn truncation_is_enforced() {
        let mut qp = three_cycle();
        qp.p = 3;
        let mut m = DecoratedRep::with_dims(&qp, vec![1, 1, 1], vec![0; 3]);
        m.mats[0] = one(1);
        m.mats[1] = one(1);
        assert!(g_vector_via_resolution(&m, &qp).is_err());
    }
}
