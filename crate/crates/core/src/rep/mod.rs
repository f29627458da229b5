//! Decorated representations of Jacobian algebras.

pub mod chi;
pub mod gvec;
pub mod hom;
pub mod mutation;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{fmt_rat, parse_rat, RatMatrix};
use crate::qp::{LinComb, QP};

pub use chi::{cc_function, chi_grassmannian, f_polynomial, ChiMethod};
pub use gvec::{
    e_invariant, e_invariant_pair, g_vector, g_vector_pair, g_vector_via_resolution, GVectorPair,
};
pub use hom::{hom_basis, hom_dim, is_isomorphic, Isomorphism};
pub use mutation::{mutate_rep, triangle_maps, MutatedRep, TriangleData};

/// A decorated representation: a matrix of shape d_t x d_s per arrow, plus a
/// decoration vector. Arrows are indexed as in the QP it lives on.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DecoratedRep {
    pub dims: Vec<usize>,
    pub decoration: Vec<usize>,
    pub mats: Vec<RatMatrix>,
}

impl DecoratedRep {
    pub fn zero(qp: &QP) -> Self {
        Self::with_dims(qp, vec![0; qp.total()], vec![0; qp.total()])
    }

    /// Zero arrow maps on the given spaces.
    pub fn with_dims(qp: &QP, dims: Vec<usize>, decoration: Vec<usize>) -> Self {
        let mats = qp
            .quiver
            .arrows
            .iter()
            .map(|a| RatMatrix::zeros(dims[a.target], dims[a.source]))
            .collect();
        DecoratedRep {
            dims,
            decoration,
            mats,
        }
    }

    /// The negative simple (0, e_k).
    pub fn negative_simple(qp: &QP, k: usize) -> Self {
        let mut v = vec![0; qp.total()];
        v[k] = 1;
        Self::with_dims(qp, vec![0; qp.total()], v)
    }

    /// The simple representation S(k).
    pub fn simple(qp: &QP, k: usize) -> Self {
        let mut d = vec![0; qp.total()];
        d[k] = 1;
        Self::with_dims(qp, d, vec![0; qp.total()])
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn is_zero_module(&self) -> bool {
        self.dims.iter().all(|&d| d == 0)
    }

    pub fn check_shapes(&self, qp: &QP) -> Result<()> {
        let t = qp.total();
        if self.dims.len() != t || self.decoration.len() != t {
            return Err(Error::ShapeMismatch(format!(
                "dimension vectors must have length {t}"
            )));
        }
        if self.mats.len() != qp.quiver.arrows.len() {
            return Err(Error::ShapeMismatch("one matrix per arrow required".into()));
        }
        for (a, m) in qp.quiver.arrows.iter().zip(&self.mats) {
            if m.nrows() != self.dims[a.target] || m.ncols() != self.dims[a.source] {
                return Err(Error::ShapeMismatch(format!(
                    "arrow {} needs a {}x{} matrix, got {}x{}",
                    a.id,
                    self.dims[a.target],
                    self.dims[a.source],
                    m.nrows(),
                    m.ncols()
                )));
            }
        }
        Ok(())
    }

    /// Matrix of a path (application order) starting at `start`.
    pub fn eval_path(&self, start: usize, path: &[usize]) -> RatMatrix {
        let mut acc = RatMatrix::identity(self.dims[start]);
        for &a in path {
            acc = self.mats[a].mul(&acc);
        }
        acc
    }

    /// Matrix of a linear combination of parallel paths from `s` to `t`.
    pub fn eval_lincomb(&self, s: usize, t: usize, lc: &LinComb) -> RatMatrix {
        let mut acc = RatMatrix::zeros(self.dims[t], self.dims[s]);
        for (path, c) in lc {
            acc = acc.add(&self.eval_path(s, path).scale(c));
        }
        acc
    }

    pub fn direct_sum(&self, other: &Self, qp: &QP) -> Self {
        let dims: Vec<usize> = self
            .dims
            .iter()
            .zip(&other.dims)
            .map(|(a, b)| a + b)
            .collect();
        let decoration = self
            .decoration
            .iter()
            .zip(&other.decoration)
            .map(|(a, b)| a + b)
            .collect();
        let mats = qp
            .quiver
            .arrows
            .iter()
            .enumerate()
            .map(|(i, a)| {
                let mut m = RatMatrix::zeros(dims[a.target], dims[a.source]);
                m.set_block(0, 0, &self.mats[i]);
                m.set_block(self.dims[a.target], self.dims[a.source], &other.mats[i]);
                m
            })
            .collect();
        DecoratedRep {
            dims,
            decoration,
            mats,
        }
    }

    /// Moves the representation to another QP by matching arrow ids; arrows
    /// absent here act by zero there. Fails if an arrow with nonzero action
    /// is missing from the target, or if support lies outside its vertices.
    pub fn transport(&self, from: &QP, to: &QP) -> Result<Self> {
        let t = to.total();
        let mut dims = vec![0; t];
        let mut decoration = vec![0; t];
        for v in 0..self.dims.len() {
            if v < t {
                dims[v] = self.dims[v];
                decoration[v] = self.decoration[v];
            } else if self.dims[v] != 0 || self.decoration[v] != 0 {
                return Err(Error::InvalidRep(format!(
                    "support meets vertex {} outside the target",
                    v + 1
                )));
            }
        }
        let mut out = Self::with_dims(to, dims, decoration);
        for (i, a) in from.quiver.arrows.iter().enumerate() {
            match to.quiver.arrow_index(&a.id) {
                Some(j) => out.mats[j] = self.mats[i].clone(),
                None if self.mats[i].is_zero() => {}
                None => {
                    return Err(Error::InvalidRep(format!(
                        "arrow {} acts nontrivially",
                        a.id
                    )))
                }
            }
        }
        out.check_shapes(to)?;
        Ok(out)
    }

    pub fn to_json(&self, qp: &QP) -> RepJson {
        RepJson {
            dims: self.dims.clone(),
            decoration: self.decoration.clone(),
            matrices: qp
                .quiver
                .arrows
                .iter()
                .zip(&self.mats)
                .map(|(a, m)| {
                    (
                        a.id.clone(),
                        m.to_rows()
                            .iter()
                            .map(|r| r.iter().map(fmt_rat).collect())
                            .collect(),
                    )
                })
                .collect(),
        }
    }

    /// Parses the JSON form; arrows without an entry act by zero.
    pub fn from_json(j: &RepJson, qp: &QP) -> Result<Self> {
        let t = qp.total();
        if j.dims.len() != t {
            return Err(Error::ShapeMismatch(format!("dims must have length {t}")));
        }
        let decoration = if j.decoration.is_empty() {
            vec![0; t]
        } else {
            j.decoration.clone()
        };
        let mut rep = Self::with_dims(qp, j.dims.clone(), decoration);
        for (id, rows) in &j.matrices {
            let a = qp
                .quiver
                .arrow_index(id)
                .ok_or_else(|| Error::Parse(format!("unknown arrow {id}")))?;
            let parsed = rows
                .iter()
                .map(|r| r.iter().map(|s| parse_rat(s)).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()?;
            let cols = rep.dims[qp.quiver.source(a)];
            if parsed.iter().any(|r| r.len() != cols) {
                return Err(Error::ShapeMismatch(format!(
                    "arrow {id} needs {cols} columns"
                )));
            }
            rep.mats[a] = RatMatrix::from_rows_with_cols(parsed, cols);
        }
        rep.check_shapes(qp)?;
        Ok(rep)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepJson {
    pub dims: Vec<usize>,
    #[serde(default)]
    pub decoration: Vec<usize>,
    #[serde(default)]
    pub matrices: BTreeMap<String, Vec<Vec<String>>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RepReport {
    pub valid: bool,
    pub nilpotent: bool,
    pub relations_hold: bool,
    pub failures: Vec<String>,
}

/// Nilpotency: the span of path matrices of length L (as block operators on
/// the total space) must reach zero by L = total dimension.
pub fn is_nilpotent(rep: &DecoratedRep, qp: &QP) -> bool {
    let d = rep.total_dim();
    if d == 0 {
        return true;
    }
    let offs: Vec<usize> = rep
        .dims
        .iter()
        .scan(0, |s, &x| {
            let o = *s;
            *s += x;
            Some(o)
        })
        .collect();
    let embed = |a: usize| {
        let arrow = &qp.quiver.arrows[a];
        let mut m = RatMatrix::zeros(d, d);
        m.set_block(offs[arrow.target], offs[arrow.source], &rep.mats[a]);
        m
    };
    let gens: Vec<RatMatrix> = (0..qp.quiver.arrows.len())
        .map(embed)
        .filter(|m| !m.is_zero())
        .collect();
    let mut layer = span_basis(&gens, d);
    for _ in 0..d {
        if layer.is_empty() {
            return true;
        }
        let next: Vec<RatMatrix> = gens
            .iter()
            .flat_map(|g| layer.iter().map(move |w| g.mul(w)))
            .collect();
        layer = span_basis(&next, d);
    }
    layer.is_empty()
}

fn span_basis(mats: &[RatMatrix], d: usize) -> Vec<RatMatrix> {
    if mats.is_empty() {
        return Vec::new();
    }
    let rows: Vec<Vec<crate::linalg::Rat>> = mats
        .iter()
        .map(|m| m.entries().cloned().collect())
        .collect();
    let rr = RatMatrix::from_rows(rows).rref();
    (0..rr.rank)
        .map(|i| {
            RatMatrix::from_rows(
                (0..d)
                    .map(|r| (0..d).map(|c| rr.r.get(i, r * d + c).clone()).collect())
                    .collect(),
            )
        })
        .collect()
}

/// Checks nilpotency and that every cyclic derivative acts by zero.
pub fn validate_rep(rep: &DecoratedRep, qp: &QP) -> Result<RepReport> {
    rep.check_shapes(qp)?;
    let mut failures = Vec::new();
    let nilpotent = is_nilpotent(rep, qp);
    if !nilpotent {
        failures.push("arrows do not act nilpotently".to_string());
    }
    let mut relations_hold = true;
    for a in 0..qp.quiver.arrows.len() {
        let d = qp.cyclic_derivative(a);
        if d.is_empty() {
            continue;
        }
        let (s, t) = (qp.quiver.target(a), qp.quiver.source(a));
        if !rep.eval_lincomb(s, t, &d).is_zero() {
            relations_hold = false;
            failures.push(format!(
                "cyclic derivative by {} acts nontrivially",
                qp.quiver.arrows[a].id
            ));
        }
    }
    Ok(RepReport {
        valid: nilpotent && relations_hold,
        nilpotent,
        relations_hold,
        failures,
    })
}

/// Largest total dimension for which the truncation order is sound.
pub fn check_truncation(rep: &DecoratedRep, qp: &QP) -> Result<()> {
    let dim = rep.total_dim();
    if dim >= qp.p {
        return Err(Error::TruncationTooSmall { p: qp.p, dim });
    }
    Ok(())
}
