//! Euler characteristics of quiver Grassmannians, F-polynomials and the
//! cluster character.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::gvec::g_vector;
use super::DecoratedRep;
use crate::error::{Error, Result};
use crate::laurent::{LaurentPoly, MonomialAssignment};
use crate::linalg::{Rat, RatMatrix};
use crate::qp::QP;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum ChiMethod {
    /// Fixed points when the coefficient quiver is a forest, else point counts.
    #[default]
    Auto,
    /// Count F_q-points for several primes, interpolate, evaluate at q = 1.
    Pointcount,
    /// Count coordinate subrepresentations of a forest-shaped basis.
    Fixedpoint,
}

impl std::str::FromStr for ChiMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(ChiMethod::Auto),
            "pointcount" => Ok(ChiMethod::Pointcount),
            "fixedpoint" => Ok(ChiMethod::Fixedpoint),
            _ => Err(Error::Parse(format!("unknown method {s}"))),
        }
    }
}

const PRIMES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
const MAX_SAMPLES: usize = 6;
const ENUMERATION_CAP: f64 = 5e7;
const FOREST_NODE_CAP: usize = 64;

pub fn chi_grassmannian(
    rep: &DecoratedRep,
    qp: &QP,
    e: &[usize],
    method: ChiMethod,
) -> Result<i64> {
    rep.check_shapes(qp)?;
    if e.len() != rep.dims.len() {
        return Err(Error::ShapeMismatch(format!(
            "sub-dimension vector must have length {}",
            rep.dims.len()
        )));
    }
    if e.iter().zip(&rep.dims).any(|(a, d)| a > d) {
        return Ok(0);
    }
    match method {
        ChiMethod::Pointcount => pointcount_chi(rep, qp, e),
        ChiMethod::Fixedpoint => Ok(fixedpoint_counts(rep, qp)?.get(e).copied().unwrap_or(0)),
        ChiMethod::Auto => match fixedpoint_counts(rep, qp) {
            Ok(c) => Ok(c.get(e).copied().unwrap_or(0)),
            Err(Error::NotApplicable(_)) => pointcount_chi(rep, qp, e),
            Err(x) => Err(x),
        },
    }
}

/// Sum over sub-dimension vectors e of chi(Gr_e(M)) X^e, in one variable per
/// mutable vertex. The module must vanish at frozen vertices.
pub fn f_polynomial(rep: &DecoratedRep, qp: &QP, method: ChiMethod) -> Result<LaurentPoly> {
    rep.check_shapes(qp)?;
    let n = qp.n();
    if rep.dims[n..].iter().any(|&d| d != 0) {
        return Err(Error::InvalidRep(
            "module is supported at a frozen vertex".into(),
        ));
    }
    let counts = match method {
        ChiMethod::Pointcount => None,
        ChiMethod::Fixedpoint => Some(fixedpoint_counts(rep, qp)?),
        ChiMethod::Auto => match fixedpoint_counts(rep, qp) {
            Ok(c) => Some(c),
            Err(Error::NotApplicable(_)) => None,
            Err(x) => return Err(x),
        },
    };
    let mut f = LaurentPoly::zero(n);
    let total = rep.dims.len();
    let mut e = vec![0usize; total];
    loop {
        let chi = match &counts {
            Some(c) => c.get(&e).copied().unwrap_or(0),
            None => pointcount_chi(rep, qp, &e)?,
        };
        if chi != 0 {
            f.add_term(
                e[..n].iter().map(|&x| x as i64).collect(),
                Rat::from_integer(chi.into()),
            );
        }
        // odometer over the box 0 <= e <= d
        let mut i = 0;
        while i < total && e[i] == rep.dims[i] {
            e[i] = 0;
            i += 1;
        }
        if i == total {
            break;
        }
        e[i] += 1;
    }
    Ok(f)
}

/// x^g F(y-hat) with y-hat_j = prod_i x_i^{b_ij}, over every vertex of the QP.
pub fn cc_function(rep: &DecoratedRep, qp: &QP, method: ChiMethod) -> Result<LaurentPoly> {
    let f = f_polynomial(rep, qp, method)?;
    let b = qp.quiver.skew_matrix();
    let n = qp.n();
    let rows: Vec<Vec<i64>> = b.iter().map(|r| r[..n].to_vec()).collect();
    let g = g_vector(rep, qp);
    Ok(f.substitute(&MonomialAssignment::y_hat(&rows))?.shift(&g))
}

// ---------------------------------------------------------------- fixed points

fn partial_permutation(m: &RatMatrix) -> bool {
    let one = Rat::one();
    let mut cols = vec![false; m.ncols()];
    for i in 0..m.nrows() {
        let mut seen = false;
        for j in 0..m.ncols() {
            let x = m.get(i, j);
            if x.is_zero() {
                continue;
            }
            if *x != one || seen || cols[j] {
                return false;
            }
            seen = true;
            cols[j] = true;
        }
    }
    true
}

type Counts = BTreeMap<Vec<usize>, i64>;

fn counts_mul(a: &Counts, b: &Counts) -> Counts {
    let mut out = Counts::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let e: Vec<usize> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
            *out.entry(e).or_insert(0) += ca * cb;
        }
    }
    out
}

fn counts_add(a: &Counts, b: &Counts) -> Counts {
    let mut out = a.clone();
    for (e, c) in b {
        *out.entry(e.clone()).or_insert(0) += c;
    }
    out
}

/// Number of successor-closed sets of basis vectors per dimension vector,
/// for modules whose arrows act by partial permutations with a forest as
/// coefficient quiver.
pub fn fixedpoint_counts(rep: &DecoratedRep, qp: &QP) -> Result<Counts> {
    if !rep.mats.iter().all(partial_permutation) {
        return Err(Error::NotApplicable(
            "arrows do not act by partial permutation matrices".into(),
        ));
    }
    let t = rep.dims.len();
    let mut nodes = Vec::new();
    let mut base = vec![0; t];
    for v in 0..t {
        base[v] = nodes.len();
        nodes.extend((0..rep.dims[v]).map(|_| v));
    }
    if nodes.len() > FOREST_NODE_CAP {
        return Err(Error::TooLarge(format!("{} basis vectors", nodes.len())));
    }
    // Directed edges x -> y of the coefficient quiver, stored on both ends.
    let mut adj: Vec<Vec<(usize, bool)>> = vec![Vec::new(); nodes.len()];
    let mut parent: Vec<usize> = (0..nodes.len()).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        if p[x] != x {
            let r = find(p, p[x]);
            p[x] = r;
        }
        p[x]
    }
    for (i, a) in qp.quiver.arrows.iter().enumerate() {
        let m = &rep.mats[i];
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                if m.get(r, c).is_zero() {
                    continue;
                }
                let (x, y) = (base[a.source] + c, base[a.target] + r);
                let (rx, ry) = (find(&mut parent, x), find(&mut parent, y));
                if rx == ry {
                    return Err(Error::NotApplicable(
                        "coefficient quiver is not a forest".into(),
                    ));
                }
                parent[rx] = ry;
                adj[x].push((y, true));
                adj[y].push((x, false));
            }
        }
    }
    let unit = |v: usize| {
        let mut e = vec![0; t];
        e[v] = 1;
        e
    };
    let empty: Counts = [(vec![0; t], 1)].into_iter().collect();
    let mut total = empty.clone();
    let mut visited = vec![false; nodes.len()];
    for root in 0..nodes.len() {
        if visited[root] {
            continue;
        }
        // Iterative post-order over the tree containing root.
        let mut order = Vec::new();
        let mut stack = vec![(root, usize::MAX)];
        let mut par = vec![usize::MAX; nodes.len()];
        while let Some((u, p)) = stack.pop() {
            visited[u] = true;
            par[u] = p;
            order.push(u);
            for &(w, _) in &adj[u] {
                if w != p {
                    stack.push((w, u));
                }
            }
        }
        let mut inc: BTreeMap<usize, Counts> = BTreeMap::new();
        let mut exc: BTreeMap<usize, Counts> = BTreeMap::new();
        for &u in order.iter().rev() {
            let mut i_u: Counts = [(unit(nodes[u]), 1)].into_iter().collect();
            let mut o_u = empty.clone();
            for &(w, forward) in &adj[u] {
                if w == par[u] {
                    continue;
                }
                let (iw, ow) = (inc.remove(&w).unwrap(), exc.remove(&w).unwrap());
                let either = counts_add(&iw, &ow);
                if forward {
                    // u -> w: choosing u forces w.
                    i_u = counts_mul(&i_u, &iw);
                    o_u = counts_mul(&o_u, &either);
                } else {
                    // w -> u: choosing w forces u.
                    i_u = counts_mul(&i_u, &either);
                    o_u = counts_mul(&o_u, &ow);
                }
            }
            inc.insert(u, i_u);
            exc.insert(u, o_u);
        }
        total = counts_mul(&total, &counts_add(&inc[&root], &exc[&root]));
    }
    total.retain(|_, c| *c != 0);
    Ok(total)
}

// ---------------------------------------------------------------- point counts

type Vector = Vec<u64>;

#[derive(Clone, Debug)]
struct ModMat {
    rows: usize,
    data: Vec<Vec<u64>>,
}

impl ModMat {
    fn apply(&self, v: &[u64], q: u64) -> Vector {
        self.data
            .iter()
            .map(|r| r.iter().zip(v).fold(0, |acc, (a, b)| (acc + a * b) % q))
            .collect()
    }
}

fn inv_mod(a: u64, q: u64) -> u64 {
    let e = BigInt::from(a).extended_gcd(&BigInt::from(q));
    e.x.mod_floor(&BigInt::from(q)).to_u64().unwrap()
}

fn reduce_rat(x: &Rat, q: u64) -> Option<u64> {
    let qb = BigInt::from(q);
    let d = x.denom().mod_floor(&qb).to_u64().unwrap();
    if d == 0 {
        return None;
    }
    let n = x.numer().mod_floor(&qb).to_u64().unwrap();
    Some(n * inv_mod(d, q) % q)
}

fn reduce_matrix(m: &RatMatrix, q: u64) -> Option<ModMat> {
    let mut data = Vec::with_capacity(m.nrows());
    for i in 0..m.nrows() {
        data.push(
            (0..m.ncols())
                .map(|j| reduce_rat(m.get(i, j), q))
                .collect::<Option<Vec<_>>>()?,
        );
    }
    Some(ModMat {
        rows: m.nrows(),
        data,
    })
}

/// Row echelon form in place; returns pivot columns.
fn echelon(rows: &mut [Vector], q: u64) -> Vec<usize> {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..rows.len()).find(|&i| rows[i][c] != 0) else {
            continue;
        };
        rows.swap(r, p);
        let inv = inv_mod(rows[r][c], q);
        for x in rows[r].iter_mut() {
            *x = *x * inv % q;
        }
        let pivot = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && row[c] != 0 {
                let f = row[c];
                for (x, y) in row.iter_mut().zip(&pivot) {
                    *x = (*x + q - f * y % q) % q;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    pivots
}

fn rank_mod(rows: &[Vector], q: u64) -> usize {
    let mut r = rows.to_vec();
    echelon(&mut r, q).len()
}

/// Basis of {x : rows . x = 0} in dimension `d`.
fn kernel_mod(rows: &[Vector], d: usize, q: u64) -> Vec<Vector> {
    let mut r = rows.to_vec();
    let pivots = echelon(&mut r, q);
    let free: Vec<usize> = (0..d).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![0; d];
            v[f] = 1;
            for (i, &p) in pivots.iter().enumerate() {
                v[p] = (q - r[i][f]) % q;
            }
            v
        })
        .collect()
}

fn combinations(d: usize, e: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, d: usize, e: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == e {
            out.push(cur.clone());
            return;
        }
        for i in start..d {
            cur.push(i);
            rec(i + 1, d, e, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, d, e, &mut Vec::new(), &mut out);
    out
}

/// A subspace with a basis and rows cutting it out.
#[derive(Clone, Debug)]
struct Subspace {
    basis: Vec<Vector>,
    equations: Vec<Vector>,
}

/// Every e-dimensional subspace of F_q^d, one reduced echelon basis each.
fn subspaces(d: usize, e: usize, q: u64) -> Vec<Subspace> {
    let mut out = Vec::new();
    for piv in combinations(d, e) {
        let free: Vec<(usize, usize)> = (0..e)
            .flat_map(|i| {
                ((piv[i] + 1)..d)
                    .filter(|c| !piv.contains(c))
                    .map(move |c| (i, c))
            })
            .collect();
        let mut digits = vec![0u64; free.len()];
        loop {
            let mut basis = vec![vec![0u64; d]; e];
            for (i, &p) in piv.iter().enumerate() {
                basis[i][p] = 1;
            }
            for (k, &(i, c)) in free.iter().enumerate() {
                basis[i][c] = digits[k];
            }
            let equations = kernel_mod(&basis, d, q);
            out.push(Subspace { basis, equations });
            let mut k = 0;
            while k < digits.len() && digits[k] == q - 1 {
                digits[k] = 0;
                k += 1;
            }
            if k == digits.len() {
                break;
            }
            digits[k] += 1;
        }
    }
    out
}

fn gauss_binomial(n: usize, k: usize, q: u64) -> u128 {
    if k > n {
        return 0;
    }
    let q = q as u128;
    let mut r: u128 = 1;
    for i in 0..k {
        r = r * (q.pow((n - i) as u32) - 1) / (q.pow((i + 1) as u32) - 1);
    }
    r
}

fn cover_cost(e: &[usize], d: &[usize], v: usize) -> usize {
    e[v] * (d[v] - e[v])
}

/// A vertex cover of the arrows minimizing the Grassmannian dimensions of
/// its vertices. Vertices with e_v in {0, d_v} are free.
fn choose_cover(qp: &QP, e: &[usize], d: &[usize]) -> Vec<bool> {
    let t = d.len();
    let nontrivial: Vec<usize> = (0..t).filter(|&v| e[v] > 0 && e[v] < d[v]).collect();
    let mut best: Vec<bool> = vec![true; t];
    if nontrivial.len() > 16 {
        return best;
    }
    let mut best_cost = usize::MAX;
    for mask in 0u32..(1 << nontrivial.len()) {
        let mut inside = vec![true; t];
        for (i, &v) in nontrivial.iter().enumerate() {
            inside[v] = mask & (1 << i) != 0;
        }
        let covers = qp
            .quiver
            .arrows
            .iter()
            .all(|a| inside[a.source] || inside[a.target]);
        if !covers {
            continue;
        }
        let cost: usize = nontrivial
            .iter()
            .filter(|&&v| inside[v])
            .map(|&v| cover_cost(e, d, v))
            .sum();
        if cost < best_cost {
            best_cost = cost;
            best = inside;
        }
    }
    best
}

struct Counter<'a> {
    qp: &'a QP,
    mats: Vec<ModMat>,
    e: &'a [usize],
    d: &'a [usize],
    q: u64,
    cover: Vec<usize>,
    outside: Vec<usize>,
    choices: Vec<Vec<Subspace>>,
    chosen: Vec<Option<usize>>,
}

impl Counter<'_> {
    fn contained(&self, a: usize, from: &Subspace, into: &Subspace) -> bool {
        from.basis.iter().all(|u| {
            let img = self.mats[a].apply(u, self.q);
            into.equations.iter().all(|eq| {
                eq.iter()
                    .zip(&img)
                    .fold(0, |s, (x, y)| (s + x * y) % self.q)
                    == 0
            })
        })
    }

    fn count(&mut self, depth: usize) -> u128 {
        if depth == self.cover.len() {
            return self.leaf();
        }
        let v = self.cover[depth];
        let mut total = 0;
        for idx in 0..self.choices[v].len() {
            self.chosen[v] = Some(idx);
            let ok = self.qp.quiver.arrows.iter().enumerate().all(|(a, arr)| {
                let (s, t) = (arr.source, arr.target);
                if (s != v && t != v) || self.d[s] == 0 || self.d[t] == 0 {
                    return true;
                }
                match (self.chosen[s], self.chosen[t]) {
                    (Some(i), Some(j)) => {
                        self.contained(a, &self.choices[s][i], &self.choices[t][j])
                    }
                    _ => true,
                }
            });
            if ok {
                total += self.count(depth + 1);
            }
        }
        self.chosen[v] = None;
        total
    }

    fn leaf(&self) -> u128 {
        let mut prod: u128 = 1;
        for &v in &self.outside {
            let dv = self.d[v];
            let mut gens: Vec<Vector> = Vec::new();
            let mut eqs: Vec<Vector> = Vec::new();
            for (a, arr) in self.qp.quiver.arrows.iter().enumerate() {
                if arr.target == v {
                    let u = &self.choices[arr.source][self.chosen[arr.source].unwrap()];
                    gens.extend(u.basis.iter().map(|x| self.mats[a].apply(x, self.q)));
                }
                if arr.source == v {
                    let u = &self.choices[arr.target][self.chosen[arr.target].unwrap()];
                    let m = &self.mats[a];
                    for eq in &u.equations {
                        eqs.push(
                            (0..dv)
                                .map(|c| {
                                    (0..m.rows).fold(0, |s, r| (s + eq[r] * m.data[r][c]) % self.q)
                                })
                                .collect(),
                        );
                    }
                }
            }
            let dim_a = rank_mod(&gens, self.q);
            let dim_b = dv - rank_mod(&eqs, self.q);
            let inside = gens.iter().all(|g| {
                eqs.iter()
                    .all(|eq| eq.iter().zip(g).fold(0, |s, (x, y)| (s + x * y) % self.q) == 0)
            });
            if !inside || self.e[v] < dim_a || self.e[v] > dim_b {
                return 0;
            }
            prod *= gauss_binomial(dim_b - dim_a, self.e[v] - dim_a, self.q);
            if prod == 0 {
                return 0;
            }
        }
        prod
    }
}

/// Nonzero path matrices, grouped by source and target vertex.
fn path_matrices(rep: &DecoratedRep, qp: &QP) -> Vec<(usize, usize, RatMatrix)> {
    let mut out = Vec::new();
    let mut frontier: Vec<(usize, usize, RatMatrix)> = (0..qp.total())
        .map(|v| (v, v, RatMatrix::identity(rep.dims[v])))
        .collect();
    for _ in 0..rep.total_dim() {
        let mut next = Vec::new();
        for (s, t, m) in &frontier {
            for b in qp.quiver.arrows_out_of(*t) {
                let p = rep.mats[b].mul(m);
                if !p.is_zero() {
                    next.push((*s, qp.quiver.target(b), p));
                }
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// A prime is good when reduction keeps the rank of every nonzero path
/// matrix, of the paths leaving each vertex stacked, and of the paths
/// entering each vertex side by side.
fn good_reduction(rep: &DecoratedRep, qp: &QP, q: u64) -> bool {
    let paths = path_matrices(rep, qp);
    let same_rank =
        |m: &RatMatrix| reduce_matrix(m, q).is_some_and(|r| rank_mod(&r.data, q) == m.rank());
    if !paths.iter().all(|(_, _, m)| same_rank(m)) {
        return false;
    }
    (0..qp.total()).all(|v| {
        let outs: Vec<&RatMatrix> = paths.iter().filter(|p| p.0 == v).map(|p| &p.2).collect();
        let ins: Vec<RatMatrix> = paths
            .iter()
            .filter(|p| p.1 == v)
            .map(|p| p.2.transpose())
            .collect();
        let stacked = RatMatrix::vstack(&outs, rep.dims[v]);
        let joined = RatMatrix::vstack(&ins.iter().collect::<Vec<_>>(), rep.dims[v]);
        same_rank(&stacked) && same_rank(&joined)
    })
}

/// Number of F_q-points of Gr_e(M mod q); `None` at a bad prime.
fn count_points(rep: &DecoratedRep, qp: &QP, e: &[usize], q: u64) -> Result<Option<u128>> {
    let mut mats = Vec::new();
    for m in &rep.mats {
        let Some(r) = reduce_matrix(m, q) else {
            return Ok(None);
        };
        mats.push(r);
    }
    if !good_reduction(rep, qp, q) {
        return Ok(None);
    }
    let d = &rep.dims;
    let inside = choose_cover(qp, e, d);
    let cover: Vec<usize> = (0..d.len()).filter(|&v| inside[v]).collect();
    let outside: Vec<usize> = (0..d.len()).filter(|&v| !inside[v]).collect();
    let estimate: f64 = cover
        .iter()
        .map(|&v| (q as f64).powi(cover_cost(e, d, v) as i32))
        .product();
    if estimate > ENUMERATION_CAP {
        return Err(Error::TooLarge(format!(
            "about {estimate:.0} subspace tuples over F_{q}"
        )));
    }
    let mut choices = vec![Vec::new(); d.len()];
    for &v in &cover {
        choices[v] = subspaces(d[v], e[v], q);
    }
    let mut c = Counter {
        qp,
        mats,
        e,
        d,
        q,
        cover,
        outside,
        choices,
        chosen: vec![None; d.len()],
    };
    Ok(Some(c.count(0)))
}

/// Polynomial through the points, as coefficients c_0..c_s (Newton form
/// expanded).
fn interpolate(xs: &[Rat], ys: &[Rat]) -> Vec<Rat> {
    let n = xs.len();
    let mut coef = ys.to_vec();
    for j in 1..n {
        for i in (j..n).rev() {
            coef[i] = (&coef[i] - &coef[i - 1]) / (&xs[i] - &xs[i - j]);
        }
    }
    let mut poly = vec![Rat::zero(); n];
    for i in (0..n).rev() {
        // poly = poly * (x - xs[i]) + coef[i]
        let mut next = vec![Rat::zero(); n];
        for (k, c) in poly.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if k + 1 < n {
                next[k + 1] += c;
            }
            next[k] -= c * &xs[i];
        }
        next[0] += &coef[i];
        poly = next;
    }
    poly
}

fn eval(poly: &[Rat], x: &Rat) -> Rat {
    poly.iter().rev().fold(Rat::zero(), |acc, c| acc * x + c)
}

/// Point counts over several primes; returns the interpolated counting
/// polynomial once a fit predicts a further sample, or once the degree bound
/// sum e_v (d_v - e_v) is met.
pub fn counting_polynomial(rep: &DecoratedRep, qp: &QP, e: &[usize]) -> Result<Vec<Rat>> {
    let degree_bound: usize = (0..e.len()).map(|v| cover_cost(e, &rep.dims, v)).sum();
    let mut xs: Vec<Rat> = Vec::new();
    let mut ys: Vec<Rat> = Vec::new();
    for &q in &PRIMES {
        let Some(c) = count_points(rep, qp, e, q)? else {
            continue;
        };
        let y = Rat::from_integer(BigInt::from(c));
        let x = Rat::from_integer(BigInt::from(q));
        if !xs.is_empty() {
            let fit = interpolate(&xs, &ys);
            if eval(&fit, &x) == y {
                return Ok(trim(fit));
            }
        }
        xs.push(x);
        ys.push(y);
        if xs.len() == degree_bound + 1 {
            return Ok(trim(interpolate(&xs, &ys)));
        }
        if xs.len() >= MAX_SAMPLES {
            break;
        }
    }
    if degree_bound >= MAX_SAMPLES {
        return Err(Error::TooLarge(format!(
            "counting polynomial of degree up to {degree_bound} needs more than {MAX_SAMPLES} samples"
        )));
    }
    Err(Error::NonPolynomialCount(format!(
        "no polynomial fit after {} samples",
        xs.len()
    )))
}

fn trim(mut p: Vec<Rat>) -> Vec<Rat> {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

fn pointcount_chi(rep: &DecoratedRep, qp: &QP, e: &[usize]) -> Result<i64> {
    let poly = counting_polynomial(rep, qp, e)?;
    let at_one = eval(&poly, &Rat::one());
    if !at_one.is_integer() || poly.iter().any(|c| !c.is_integer()) {
        return Err(Error::NonPolynomialCount(format!(
            "counting polynomial has value {at_one} at 1"
        )));
    }
    at_one
        .to_integer()
        .to_i64()
        .ok_or_else(|| Error::TooLarge("Euler characteristic overflows".into()))
}
