//! Mutation of decorated representations.

use super::{validate_rep, DecoratedRep};
use crate::error::{Error, Result};
use crate::linalg::{complement_columns, RatMatrix};
use crate::qp::reduce::{mutate_qp, MutatedQp};
use crate::qp::{ArrowOrigin, QP};

/// The maps around vertex k:
/// alpha: M_in -> M_k, beta: M_k -> M_out, gamma: M_out -> M_in, where
/// M_in sums M_s(a) over arrows a into k and M_out sums M_t(b) over arrows
/// b out of k, both in `arrows_into` / `arrows_out_of` order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TriangleData {
    pub ins: Vec<usize>,
    pub outs: Vec<usize>,
    pub in_offsets: Vec<usize>,
    pub out_offsets: Vec<usize>,
    pub alpha: RatMatrix,
    pub beta: RatMatrix,
    pub gamma: RatMatrix,
}

impl TriangleData {
    pub fn dim_in(&self) -> usize {
        self.alpha.ncols()
    }

    pub fn dim_out(&self) -> usize {
        self.beta.nrows()
    }
}

fn offsets(sizes: impl Iterator<Item = usize>) -> (Vec<usize>, usize) {
    let mut out = Vec::new();
    let mut acc = 0;
    for s in sizes {
        out.push(acc);
        acc += s;
    }
    (out, acc)
}

pub fn triangle_maps(rep: &DecoratedRep, qp: &QP, k: usize) -> TriangleData {
    let q = &qp.quiver;
    let ins = q.arrows_into(k);
    let outs = q.arrows_out_of(k);
    let dk = rep.dims[k];
    let (in_offsets, din) = offsets(ins.iter().map(|&a| rep.dims[q.source(a)]));
    let (out_offsets, dout) = offsets(outs.iter().map(|&b| rep.dims[q.target(b)]));
    let mut alpha = RatMatrix::zeros(dk, din);
    for (i, &a) in ins.iter().enumerate() {
        alpha.set_block(0, in_offsets[i], &rep.mats[a]);
    }
    let mut beta = RatMatrix::zeros(dout, dk);
    for (j, &b) in outs.iter().enumerate() {
        beta.set_block(out_offsets[j], 0, &rep.mats[b]);
    }
    // Block (a, b): the part of the derivative by a whose paths begin with
    // b, with b removed.
    let mut gamma = RatMatrix::zeros(din, dout);
    for (i, &a) in ins.iter().enumerate() {
        let d = qp.cyclic_derivative(a);
        let s = q.source(a);
        for (j, &b) in outs.iter().enumerate() {
            let tb = q.target(b);
            let mut block = RatMatrix::zeros(rep.dims[s], rep.dims[tb]);
            for (path, c) in &d {
                if path.first() == Some(&b) {
                    block = block.add(&rep.eval_path(tb, &path[1..]).scale(c));
                }
            }
            gamma.set_block(in_offsets[i], out_offsets[j], &block);
        }
    }
    TriangleData {
        ins,
        outs,
        in_offsets,
        out_offsets,
        alpha,
        beta,
        gamma,
    }
}

#[derive(Clone, Debug)]
pub struct MutatedRep {
    pub rep: DecoratedRep,
    pub qp: MutatedQp,
}

/// Mutation at `k` (0-based). The result lives on the reduced part of the
/// premutated QP; surviving arrows keep their matrices.
pub fn mutate_rep(rep: &DecoratedRep, qp: &QP, k: usize) -> Result<MutatedRep> {
    let report = validate_rep(rep, qp)?;
    if !report.valid {
        return Err(Error::InvalidRep(report.failures.join("; ")));
    }
    let mq = mutate_qp(qp, k)?;
    let tri = triangle_maps(rep, qp, k);
    let (alpha, beta, gamma) = (&tri.alpha, &tri.beta, &tri.gamma);
    let (din, dout, dk) = (tri.dim_in(), tri.dim_out(), rep.dims[k]);

    let ker_g = gamma.kernel_matrix(); // dout x kappa
    let kappa = ker_g.ncols();
    let retract = if kappa > 0 {
        ker_g.left_inverse()
    } else {
        RatMatrix::zeros(0, dout)
    };
    let beta_in_ker = retract.mul(beta); // kappa x dk
    let proj = beta_in_ker.cokernel_projection(); // (kappa - rank beta) x kappa
    let homology = proj.nrows();
    let img_g = gamma.image_basis(); // din x rho
    let rho = img_g.ncols();
    let gamma_coords = if rho > 0 {
        img_g.solve(gamma).expect("gamma lies in its image")
    } else {
        RatMatrix::zeros(0, dout)
    };
    let ker_a = alpha.kernel_matrix();
    let lift = complement_columns(&img_g, &ker_a); // din x (null alpha - rho)
    let extra = lift.ncols();
    let vk = rep.decoration[k];
    let new_dk = homology + rho + extra + vk;

    // M_out -> new M_k and new M_k -> M_in.
    let mut new_alpha = RatMatrix::zeros(new_dk, dout);
    new_alpha.set_block(0, 0, &proj.mul(&retract).scale(&crate::linalg::rat(-1)));
    new_alpha.set_block(homology, 0, &gamma_coords.scale(&crate::linalg::rat(-1)));
    let mut new_beta = RatMatrix::zeros(din, new_dk);
    new_beta.set_block(0, homology, &img_g);
    new_beta.set_block(0, homology + rho, &lift);

    let null_b = dk - beta.rank();
    let null_ba = din - beta.mul(alpha).rank();
    let null_a = din - alpha.rank();
    let new_vk = null_b + null_a - null_ba;

    let pm = &mq.premutated;
    let mut dims = rep.dims.clone();
    dims[k] = new_dk;
    let mut decoration = rep.decoration.clone();
    decoration[k] = new_vk;
    let in_pos = |a: usize| tri.ins.iter().position(|&x| x == a).unwrap();
    let out_pos = |b: usize| tri.outs.iter().position(|&x| x == b).unwrap();
    let q = &qp.quiver;
    let pre_mats: Vec<RatMatrix> = pm
        .origin
        .iter()
        .map(|o| match *o {
            ArrowOrigin::Original(i) => rep.mats[i].clone(),
            ArrowOrigin::Composite { a, b } => rep.mats[b].mul(&rep.mats[a]),
            ArrowOrigin::ReversedIn(a) => {
                let i = in_pos(a);
                new_beta.block(tri.in_offsets[i], rep.dims[q.source(a)], 0, new_dk)
            }
            ArrowOrigin::ReversedOut(b) => {
                let j = out_pos(b);
                new_alpha.block(0, new_dk, tri.out_offsets[j], rep.dims[q.target(b)])
            }
        })
        .collect();
    let mats = mq
        .reduced
        .kept
        .iter()
        .map(|&i| pre_mats[i].clone())
        .collect();
    let out = DecoratedRep {
        dims,
        decoration,
        mats,
    };
    out.check_shapes(mq.qp())?;
    Ok(MutatedRep { rep: out, qp: mq })
}

#[cfg(test)]
mod tests {
    use super::super::hom::is_isomorphic;
    use super::super::tests::one;
    use super::*;
    use crate::qp::compare_up_to_relabeling;
    use crate::qp::tests::{three_cycle, two_triangles};
    use crate::qp::QpComparison;

    #[test]
    fn negative_simple_becomes_simple() {
        let qp = three_cycle();
        for k in 0..3 {
            let m = mutate_rep(&DecoratedRep::negative_simple(&qp, k), &qp, k).unwrap();
            let mut d = vec![0; 3];
            d[k] = 1;
            assert_eq!(m.rep.dims, d);
            assert_eq!(m.rep.decoration, vec![0; 3]);
            let back = mutate_rep(&m.rep, m.qp.qp(), k).unwrap();
            assert_eq!(back.rep.dims, vec![0; 3]);
            assert_eq!(back.rep.decoration, d);
        }
    }

    #[test]
    fn simple_at_two_on_two_triangles() {
        let qp = two_triangles();
        let s2 = DecoratedRep::simple(&qp, 1);
        let m = mutate_rep(&s2, &qp, 1).unwrap();
        assert_eq!(m.rep.dims, vec![0, 0, 0, 0]);
        assert_eq!(m.rep.decoration, vec![0, 1, 0, 0]);
        let t = triangle_maps(&s2, &qp, 2);
        assert_eq!((t.alpha.nrows(), t.alpha.ncols()), (0, 0));
    }

    pub fn transport(rep: &DecoratedRep, from: &QP, to: &QP) -> Option<DecoratedRep> {
        let (mapping, negated) = match compare_up_to_relabeling(from, to) {
            QpComparison::Equal { mapping } => (mapping, vec![]),
            QpComparison::EqualAfterSigns { mapping, negated } => (mapping, negated),
            _ => return None,
        };
        let mut out = DecoratedRep::with_dims(to, rep.dims.clone(), rep.decoration.clone());
        for (i, &j) in mapping.iter().enumerate() {
            let m = &rep.mats[i];
            out.mats[j] = if negated.contains(&i) {
                m.scale(&crate::linalg::rat(-1))
            } else {
                m.clone()
            };
        }
        Some(out)
    }

    #[test]
    fn involution_on_small_modules() {
        let qp = three_cycle();
        let mut m = DecoratedRep::with_dims(&qp, vec![1, 1, 0], vec![0; 3]);
        m.mats[0] = one(1);
        for k in 0..3 {
            let once = mutate_rep(&m, &qp, k).unwrap();
            assert!(validate_rep(&once.rep, once.qp.qp()).unwrap().valid);
            let twice = mutate_rep(&once.rep, once.qp.qp(), k).unwrap();
            let back = transport(&twice.rep, twice.qp.qp(), &qp).unwrap();
            assert!(is_isomorphic(&back, &m, &qp).holds(), "k={k}");
        }
    }
}
