//! Morphism spaces and isomorphism testing.

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::DecoratedRep;
use crate::linalg::{rat, Rat, RatMatrix};
use crate::qp::QP;

/// The linear system whose kernel is Hom(M, N): unknowns are the entries of
/// f_v (row-major, vertex by vertex), one block of equations
/// f_t M_a - N_a f_s = 0 per arrow.
fn hom_system(m: &DecoratedRep, n: &DecoratedRep, qp: &QP) -> (RatMatrix, Vec<usize>) {
    let t = qp.total();
    let mut offs = Vec::with_capacity(t);
    let mut acc = 0;
    for v in 0..t {
        offs.push(acc);
        acc += n.dims[v] * m.dims[v];
    }
    let unknowns = acc;
    let mut rows: Vec<Vec<Rat>> = Vec::new();
    for (i, a) in qp.quiver.arrows.iter().enumerate() {
        let (s, tt) = (a.source, a.target);
        let (ma, na) = (&m.mats[i], &n.mats[i]);
        // entry (r, c) of f_t M_a - N_a f_s, r < dN_t, c < dM_s
        for r in 0..n.dims[tt] {
            for c in 0..m.dims[s] {
                let mut row = vec![Rat::zero(); unknowns];
                for j in 0..m.dims[tt] {
                    let x = ma.get(j, c);
                    if !x.is_zero() {
                        row[offs[tt] + r * m.dims[tt] + j] += x;
                    }
                }
                for j in 0..n.dims[s] {
                    let x = na.get(r, j);
                    if !x.is_zero() {
                        row[offs[s] + j * m.dims[s] + c] -= x;
                    }
                }
                if row.iter().any(|x| !x.is_zero()) {
                    rows.push(row);
                }
            }
        }
    }
    (RatMatrix::from_rows_with_cols(rows, unknowns), offs)
}

pub fn hom_dim(m: &DecoratedRep, n: &DecoratedRep, qp: &QP) -> usize {
    let (sys, _) = hom_system(m, n, qp);
    sys.ncols() - sys.rank()
}

/// A basis of Hom(M, N); each element is the list of vertex maps f_v.
pub fn hom_basis(m: &DecoratedRep, n: &DecoratedRep, qp: &QP) -> Vec<Vec<RatMatrix>> {
    let (sys, offs) = hom_system(m, n, qp);
    sys.kernel_rational()
        .into_iter()
        .map(|v| unpack(&v, &offs, m, n))
        .collect()
}

fn unpack(v: &[Rat], offs: &[usize], m: &DecoratedRep, n: &DecoratedRep) -> Vec<RatMatrix> {
    (0..offs.len())
        .map(|x| {
            let (r, c) = (n.dims[x], m.dims[x]);
            RatMatrix::from_rows_with_cols(
                (0..r)
                    .map(|i| (0..c).map(|j| v[offs[x] + i * c + j].clone()).collect())
                    .collect(),
                c,
            )
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "result", rename_all = "camelCase")]
pub enum Isomorphism {
    /// An invertible morphism was found.
    Isomorphic,
    /// Certain: a numerical invariant differs.
    NotIsomorphic { reason: String },
    /// Random elements of Hom(M, N) were all singular; by Schwartz-Zippel
    /// the error probability is below `error_bound`.
    ProbablyNotIsomorphic { error_bound: f64 },
}

impl Isomorphism {
    pub fn holds(&self) -> bool {
        matches!(self, Isomorphism::Isomorphic)
    }
}

const TRIALS: usize = 20;
const SMALL_SEARCH_DIM: usize = 6;
const RANGE: i64 = 1000;

/// Decorated isomorphism test: equal dimension and decoration vectors and an
/// invertible morphism.
pub fn is_isomorphic(m: &DecoratedRep, n: &DecoratedRep, qp: &QP) -> Isomorphism {
    if m.dims != n.dims {
        return Isomorphism::NotIsomorphic {
            reason: "dimension vectors differ".into(),
        };
    }
    if m.decoration != n.decoration {
        return Isomorphism::NotIsomorphic {
            reason: "decorations differ".into(),
        };
    }
    let dims = [
        hom_dim(m, m, qp),
        hom_dim(m, n, qp),
        hom_dim(n, m, qp),
        hom_dim(n, n, qp),
    ];
    if dims.iter().any(|&d| d != dims[0]) {
        return Isomorphism::NotIsomorphic {
            reason: format!("hom dimensions differ: {dims:?}"),
        };
    }
    if m.is_zero_module() {
        return Isomorphism::Isomorphic;
    }
    let basis = hom_basis(m, n, qp);
    let invertible = |coeffs: &[Rat]| {
        (0..qp.total()).all(|v| {
            let mut f = RatMatrix::zeros(n.dims[v], m.dims[v]);
            for (b, c) in basis.iter().zip(coeffs) {
                f = f.add(&b[v].scale(c));
            }
            f.rank() == m.dims[v]
        })
    };
    let mut rng = ChaCha8Rng::seed_from_u64(0x150);
    for _ in 0..TRIALS {
        let coeffs: Vec<Rat> = basis
            .iter()
            .map(|_| rat(rng.gen_range(-RANGE..=RANGE)))
            .collect();
        if invertible(&coeffs) {
            return Isomorphism::Isomorphic;
        }
    }
    // Coefficients in {-1, 0, 1} for small Hom spaces.
    if basis.len() <= SMALL_SEARCH_DIM {
        let mut digits = vec![0usize; basis.len()];
        loop {
            let coeffs: Vec<Rat> = digits.iter().map(|&d| rat(d as i64 - 1)).collect();
            if invertible(&coeffs) {
                return Isomorphism::Isomorphic;
            }
            let mut k = 0;
            while k < digits.len() && digits[k] == 2 {
                digits[k] = 0;
                k += 1;
            }
            if k == digits.len() {
                break;
            }
            digits[k] += 1;
        }
    }
    let p = m.total_dim() as f64 / (2 * RANGE + 1) as f64;
    Isomorphism::ProbablyNotIsomorphic {
        error_bound: p.powi(TRIALS as i32),
    }
}
