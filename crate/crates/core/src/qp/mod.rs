//! Quivers with potential: cyclic derivatives, restriction, premutation and
//! reduction.
//!
//! Paths and cycles are arrow-index sequences in application order: `[a, b]`
//! means "apply `a`, then `b`", so `t(a) = s(b)`. The printed product is the
//! reverse, `ba`.

pub mod gentle;
pub mod reduce;

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{fmt_rat, parse_rat, Rat};
use crate::seed::ExchangeMatrix;

pub use reduce::{mutate_qp, reduce_qp, MutatedQp, Reduced};

pub const DEFAULT_TRUNCATION: usize = 12;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Arrow {
    pub id: String,
    pub source: usize,
    pub target: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Quiver {
    pub n: usize,
    pub m: usize,
    pub arrows: Vec<Arrow>,
}

impl Quiver {
    pub fn new(n: usize, m: usize, arrows: Vec<Arrow>) -> Result<Self> {
        let q = Quiver { n, m, arrows };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<()> {
        let t = self.total();
        let mut ids = std::collections::HashSet::new();
        for a in &self.arrows {
            if a.source >= t || a.target >= t {
                return Err(Error::ShapeMismatch(format!(
                    "arrow {} has an endpoint outside [{t}]",
                    a.id
                )));
            }
            if !ids.insert(a.id.as_str()) {
                return Err(Error::ShapeMismatch(format!("duplicate arrow id {}", a.id)));
            }
        }
        Ok(())
    }

    pub fn total(&self) -> usize {
        self.n + self.m
    }

    pub fn arrow_index(&self, id: &str) -> Option<usize> {
        self.arrows.iter().position(|a| a.id == id)
    }

    pub fn source(&self, a: usize) -> usize {
        self.arrows[a].source
    }

    pub fn target(&self, a: usize) -> usize {
        self.arrows[a].target
    }

    /// Arrows ending at `v`, sorted by (source, index).
    pub fn arrows_into(&self, v: usize) -> Vec<usize> {
        let mut out: Vec<usize> = (0..self.arrows.len())
            .filter(|&a| self.arrows[a].target == v)
            .collect();
        out.sort_by_key(|&a| (self.arrows[a].source, a));
        out
    }

    /// Arrows starting at `v`, sorted by (target, index).
    pub fn arrows_out_of(&self, v: usize) -> Vec<usize> {
        let mut out: Vec<usize> = (0..self.arrows.len())
            .filter(|&a| self.arrows[a].source == v)
            .collect();
        out.sort_by_key(|&a| (self.arrows[a].target, a));
        out
    }

    pub fn has_loop_at(&self, k: usize) -> bool {
        self.arrows.iter().any(|a| a.source == k && a.target == k)
    }

    pub fn has_two_cycle_at(&self, k: usize) -> bool {
        self.arrows.iter().any(|a| {
            a.target == k
                && a.source != k
                && self
                    .arrows
                    .iter()
                    .any(|b| b.source == k && b.target == a.source)
        })
    }

    /// Full skew matrix with entry (i,j) = #{j -> i} - #{i -> j}.
    pub fn skew_matrix(&self) -> Vec<Vec<i64>> {
        let t = self.total();
        let mut b = vec![vec![0i64; t]; t];
        for a in &self.arrows {
            if a.source != a.target {
                b[a.target][a.source] += 1;
                b[a.source][a.target] -= 1;
            }
        }
        b
    }

    /// The (n+m) x n exchange matrix of the quiver.
    pub fn b_matrix(&self) -> ExchangeMatrix {
        let full = self.skew_matrix();
        let rows = full.iter().map(|r| r[..self.n].to_vec()).collect();
        ExchangeMatrix {
            n: self.n,
            m: self.m,
            rows,
        }
    }

    /// (source, target) of a nonempty path, or `None` if it does not compose.
    pub fn path_endpoints(&self, path: &[usize]) -> Option<(usize, usize)> {
        let first = *path.first()?;
        for w in path.windows(2) {
            if self.target(w[0]) != self.source(w[1]) {
                return None;
            }
        }
        Some((self.source(first), self.target(*path.last().unwrap())))
    }

    pub fn is_cycle(&self, path: &[usize]) -> bool {
        matches!(self.path_endpoints(path), Some((s, t)) if s == t)
    }
}

/// A finite linear combination of paths.
pub type LinComb = BTreeMap<Vec<usize>, Rat>;

pub fn lin_add(acc: &mut LinComb, path: Vec<usize>, c: Rat) {
    if c.is_zero() {
        return;
    }
    let e = acc.entry(path).or_insert_with(Rat::zero);
    *e += c;
    if e.is_zero() {
        acc.retain(|_, v| !v.is_zero());
    }
}

/// Least rotation of a cycle under lexicographic order.
pub fn canonical_rotation(cycle: &[usize]) -> Vec<usize> {
    let l = cycle.len();
    (0..l)
        .map(|r| {
            cycle[r..]
                .iter()
                .chain(&cycle[..r])
                .copied()
                .collect::<Vec<_>>()
        })
        .min()
        .unwrap_or_default()
}

/// A potential: cycles in canonical rotation with nonzero coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Potential {
    terms: BTreeMap<Vec<usize>, Rat>,
}

impl Potential {
    pub fn new() -> Self {
        Potential::default()
    }

    pub fn add_cycle(&mut self, c: Rat, cycle: &[usize]) {
        lin_add(&mut self.terms, canonical_rotation(cycle), c);
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Rat, Vec<usize>)>) -> Self {
        let mut p = Potential::new();
        for (c, cyc) in terms {
            p.add_cycle(c, &cyc);
        }
        p
    }

    pub fn terms(&self) -> &BTreeMap<Vec<usize>, Rat> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn truncate(&mut self, p: usize) {
        self.terms.retain(|c, _| c.len() <= p);
    }

    /// Renames arrows; terms whose arrows map to `None` are dropped.
    pub fn map_arrows(&self, f: impl Fn(usize) -> Option<usize>) -> Potential {
        let mut out = Potential::new();
        for (cyc, c) in &self.terms {
            if let Some(mapped) = cyc.iter().map(|&a| f(a)).collect::<Option<Vec<_>>>() {
                out.add_cycle(c.clone(), &mapped);
            }
        }
        out
    }

    /// Simultaneous substitution of arrows by linear combinations of paths,
    /// dropping products longer than `p`.
    pub fn substitute(&self, subs: &HashMap<usize, LinComb>, p: usize) -> Potential {
        let mut out = Potential::new();
        for (cyc, c) in &self.terms {
            let mut partial: Vec<(Vec<usize>, Rat)> = vec![(Vec::new(), c.clone())];
            for &a in cyc {
                let mut next = Vec::new();
                let repl: Vec<(Vec<usize>, Rat)> = match subs.get(&a) {
                    Some(lc) => lc
                        .iter()
                        .map(|(path, x)| (path.clone(), x.clone()))
                        .collect(),
                    None => vec![(vec![a], Rat::one())],
                };
                for (path, x) in &partial {
                    for (r, y) in &repl {
                        if path.len() + r.len() > p {
                            continue;
                        }
                        let mut np = path.clone();
                        np.extend(r);
                        next.push((np, x * y));
                    }
                }
                partial = next;
            }
            for (path, x) in partial {
                out.add_cycle(x, &path);
            }
        }
        out
    }
}

/// A quiver with potential and a path-length truncation order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QP {
    pub quiver: Quiver,
    pub potential: Potential,
    pub p: usize,
}

impl QP {
    pub fn new(quiver: Quiver, potential: Potential, p: usize) -> Result<Self> {
        let qp = QP {
            quiver,
            potential,
            p,
        };
        qp.validate()?;
        Ok(qp)
    }

    pub fn validate(&self) -> Result<()> {
        self.quiver.validate()?;
        if self.p < 3 {
            return Err(Error::Precondition(format!(
                "truncation order {} is below 3",
                self.p
            )));
        }
        for cyc in self.potential.terms.keys() {
            if cyc.len() < 2
                || cyc.iter().any(|&a| a >= self.quiver.arrows.len())
                || !self.quiver.is_cycle(cyc)
            {
                return Err(Error::ShapeMismatch(format!(
                    "potential term {} is not a cycle",
                    self.path_label(cyc)
                )));
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.quiver.n
    }

    pub fn total(&self) -> usize {
        self.quiver.total()
    }

    pub fn arrow(&self, a: usize) -> &Arrow {
        &self.quiver.arrows[a]
    }

    pub fn path_label(&self, path: &[usize]) -> String {
        path.iter()
            .map(|&a| self.quiver.arrows.get(a).map_or("?", |x| x.id.as_str()))
            .collect::<Vec<_>>()
            .join(",")
    }

    /// Cyclic derivative with respect to arrow `a`: paths from t(a) to s(a).
    pub fn cyclic_derivative(&self, a: usize) -> LinComb {
        cyclic_derivative(&self.potential, a)
    }

    /// Deletes the frozen vertices and every arrow or potential term that
    /// touches them.
    pub fn restrict(&self) -> QP {
        let n = self.quiver.n;
        let mut map = vec![None; self.quiver.arrows.len()];
        let mut arrows = Vec::new();
        for (i, a) in self.quiver.arrows.iter().enumerate() {
            if a.source < n && a.target < n {
                map[i] = Some(arrows.len());
                arrows.push(a.clone());
            }
        }
        QP {
            quiver: Quiver { n, m: 0, arrows },
            potential: self.potential.map_arrows(|a| map[a]),
            p: self.p,
        }
    }

    /// The mutable part with one frozen vertex j' and one arrow j -> j' per
    /// mutable vertex j.
    pub fn principal(&self) -> QP {
        let r = self.restrict();
        let n = r.quiver.n;
        let mut arrows = r.quiver.arrows.clone();
        for j in 0..n {
            arrows.push(Arrow {
                id: format!("p{}", j + 1),
                source: j,
                target: n + j,
            });
        }
        QP {
            quiver: Quiver { n, m: n, arrows },
            potential: r.potential,
            p: self.p,
        }
    }

    fn check_mutable(&self, k: usize) -> Result<()> {
        if k >= self.quiver.n {
            return Err(Error::KOutOfRange(k + 1));
        }
        if self.quiver.has_loop_at(k) {
            return Err(Error::LoopAtK(k + 1));
        }
        if self.quiver.has_two_cycle_at(k) {
            return Err(Error::TwoCycleAtK(k + 1));
        }
        Ok(())
    }

    /// QP premutation at `k` (0-based).
    pub fn premutate(&self, k: usize) -> Result<Premutated> {
        self.check_mutable(k)?;
        let q = &self.quiver;
        let ins = q.arrows_into(k);
        let outs = q.arrows_out_of(k);
        let mut arrows = Vec::new();
        let mut origin = Vec::new();
        let mut old_to_new = vec![None; q.arrows.len()];
        for (i, a) in q.arrows.iter().enumerate() {
            if a.source != k && a.target != k {
                old_to_new[i] = Some(arrows.len());
                arrows.push(a.clone());
                origin.push(ArrowOrigin::Original(i));
            }
        }
        let mut composite = HashMap::new();
        for &a in &ins {
            for &b in &outs {
                composite.insert((a, b), arrows.len());
                arrows.push(Arrow {
                    id: format!("[{}{}]", q.arrows[b].id, q.arrows[a].id),
                    source: q.source(a),
                    target: q.target(b),
                });
                origin.push(ArrowOrigin::Composite { a, b });
            }
        }
        let mut star_in = HashMap::new();
        for &a in &ins {
            star_in.insert(a, arrows.len());
            arrows.push(Arrow {
                id: format!("{}*", q.arrows[a].id),
                source: k,
                target: q.source(a),
            });
            origin.push(ArrowOrigin::ReversedIn(a));
        }
        let mut star_out = HashMap::new();
        for &b in &outs {
            star_out.insert(b, arrows.len());
            arrows.push(Arrow {
                id: format!("{}*", q.arrows[b].id),
                source: q.target(b),
                target: k,
            });
            origin.push(ArrowOrigin::ReversedOut(b));
        }
        let mut pot = Potential::new();
        for (cyc, c) in self.potential.terms() {
            let l = cyc.len();
            let r = (0..l)
                .find(|&i| q.source(cyc[i]) != k)
                .expect("cycle without loops leaves k");
            let rot: Vec<usize> = cyc[r..].iter().chain(&cyc[..r]).copied().collect();
            let mut new_cycle = Vec::new();
            let mut i = 0;
            while i < l {
                let a = rot[i];
                if q.target(a) == k {
                    new_cycle.push(composite[&(a, rot[i + 1])]);
                    i += 2;
                } else {
                    new_cycle.push(old_to_new[a].expect("arrow away from k"));
                    i += 1;
                }
            }
            pot.add_cycle(c.clone(), &new_cycle);
        }
        for &a in &ins {
            for &b in &outs {
                pot.add_cycle(Rat::one(), &[star_in[&a], composite[&(a, b)], star_out[&b]]);
            }
        }
        let qp = QP {
            quiver: Quiver {
                n: q.n,
                m: q.m,
                arrows,
            },
            potential: pot,
            p: self.p,
        };
        Ok(Premutated { qp, origin, k })
    }

    pub fn to_json(&self) -> QpJson {
        QpJson {
            n: self.quiver.n,
            m: self.quiver.m,
            arrows: self
                .quiver
                .arrows
                .iter()
                .map(|a| ArrowJson {
                    id: a.id.clone(),
                    from: a.source + 1,
                    to: a.target + 1,
                })
                .collect(),
            potential: self
                .potential
                .terms()
                .iter()
                .map(|(cyc, c)| PotentialTermJson {
                    coeff: fmt_rat(c),
                    cycle: cyc
                        .iter()
                        .map(|&a| self.quiver.arrows[a].id.clone())
                        .collect(),
                })
                .collect(),
            p: Some(self.p),
        }
    }

    pub fn from_json(j: &QpJson) -> Result<Self> {
        let total = j.n + j.m;
        let mut arrows = Vec::new();
        for a in &j.arrows {
            if a.from == 0 || a.to == 0 || a.from > total || a.to > total {
                return Err(Error::ShapeMismatch(format!(
                    "arrow {} has an endpoint outside [{total}]",
                    a.id
                )));
            }
            arrows.push(Arrow {
                id: a.id.clone(),
                source: a.from - 1,
                target: a.to - 1,
            });
        }
        let quiver = Quiver::new(j.n, j.m, arrows)?;
        let mut pot = Potential::new();
        for t in &j.potential {
            let cyc = t
                .cycle
                .iter()
                .map(|id| {
                    quiver
                        .arrow_index(id)
                        .ok_or_else(|| Error::Parse(format!("unknown arrow {id}")))
                })
                .collect::<Result<Vec<_>>>()?;
            pot.add_cycle(parse_rat(&t.coeff)?, &cyc);
        }
        QP::new(quiver, pot, j.p.unwrap_or(DEFAULT_TRUNCATION))
    }
}

pub fn cyclic_derivative(s: &Potential, a: usize) -> LinComb {
    let mut out = LinComb::new();
    for (cyc, c) in s.terms() {
        for i in 0..cyc.len() {
            if cyc[i] == a {
                let path: Vec<usize> = cyc[i + 1..].iter().chain(&cyc[..i]).copied().collect();
                lin_add(&mut out, path, c.clone());
            }
        }
    }
    out
}

/// Where an arrow of a premutated QP comes from (indices into the old QP).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ArrowOrigin {
    Original(usize),
    /// `a*` for an arrow `a` into k.
    ReversedIn(usize),
    /// `b*` for an arrow `b` out of k.
    ReversedOut(usize),
    /// `[ba]` for `a` into k and `b` out of k.
    Composite {
        a: usize,
        b: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Premutated {
    pub qp: QP,
    pub origin: Vec<ArrowOrigin>,
    pub k: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrowJson {
    pub id: String,
    pub from: usize,
    pub to: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PotentialTermJson {
    pub coeff: String,
    pub cycle: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QpJson {
    pub n: usize,
    #[serde(default)]
    pub m: usize,
    pub arrows: Vec<ArrowJson>,
    #[serde(default)]
    pub potential: Vec<PotentialTermJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<usize>,
}

/// Outcome of comparing two QPs up to renaming arrows.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "result", rename_all = "camelCase")]
pub enum QpComparison {
    /// Some endpoint-preserving arrow bijection matches the potentials
    /// (`mapping[i]` is the arrow of the second QP matched with arrow `i`).
    Equal {
        mapping: Vec<usize>,
    },
    /// As `Equal` after negating the listed arrows of the first QP.
    EqualAfterSigns {
        mapping: Vec<usize>,
        negated: Vec<usize>,
    },
    /// Quivers match but no relabeling matches the potentials; a nontrivial
    /// change of arrows might still do so.
    Inconclusive,
    QuiverMismatch,
}

impl QpComparison {
    pub fn is_equivalent(&self) -> bool {
        matches!(
            self,
            QpComparison::Equal { .. } | QpComparison::EqualAfterSigns { .. }
        )
    }
}

/// Arrows to negate so that `a` becomes `b`, when both have the same cycles
/// with coefficients equal up to sign. Solves the parity system over GF(2).
fn sign_change(a: &Potential, b: &Potential, narrows: usize) -> Option<Vec<usize>> {
    if a.terms().len() != b.terms().len() {
        return None;
    }
    let mut rows: Vec<(Vec<bool>, bool)> = Vec::new();
    for (cyc, ca) in a.terms() {
        let cb = b.terms().get(cyc)?;
        let flip = if ca == cb {
            false
        } else if *ca == -cb.clone() {
            true
        } else {
            return None;
        };
        let mut row = vec![false; narrows];
        for &x in cyc {
            row[x] ^= true;
        }
        rows.push((row, flip));
    }
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..narrows {
        let Some(pr) = (r..rows.len()).find(|&i| rows[i].0[col]) else {
            continue;
        };
        rows.swap(r, pr);
        let pivot = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && row.0[col] {
                for (x, y) in row.0.iter_mut().zip(&pivot.0) {
                    *x ^= *y;
                }
                row.1 ^= pivot.1;
            }
        }
        pivots.push(col);
        r += 1;
    }
    if rows[r..].iter().any(|row| row.1) {
        return None;
    }
    Some(
        pivots
            .iter()
            .enumerate()
            .filter(|(i, _)| rows[*i].1)
            .map(|(_, &c)| c)
            .collect(),
    )
}

const RELABEL_CAP: usize = 50_000;

/// Compares potentials up to arrow relabeling, truncated at the smaller
/// truncation order.
pub fn compare_up_to_relabeling(a: &QP, b: &QP) -> QpComparison {
    let qa = &a.quiver;
    let qb = &b.quiver;
    if qa.n != qb.n || qa.m != qb.m || qa.arrows.len() != qb.arrows.len() {
        return QpComparison::QuiverMismatch;
    }
    let mut groups_a: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    let mut groups_b: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for (i, x) in qa.arrows.iter().enumerate() {
        groups_a.entry((x.source, x.target)).or_default().push(i);
    }
    for (i, x) in qb.arrows.iter().enumerate() {
        groups_b.entry((x.source, x.target)).or_default().push(i);
    }
    if groups_a
        .iter()
        .map(|(k, v)| (*k, v.len()))
        .collect::<Vec<_>>()
        != groups_b
            .iter()
            .map(|(k, v)| (*k, v.len()))
            .collect::<Vec<_>>()
    {
        return QpComparison::QuiverMismatch;
    }
    let p = a.p.min(b.p);
    let mut pa = a.potential.clone();
    pa.truncate(p);
    let mut pb = b.potential.clone();
    pb.truncate(p);
    let keys: Vec<(usize, usize)> = groups_a.keys().copied().collect();
    let perms: Vec<Vec<Vec<usize>>> = keys.iter().map(|k| permutations(&groups_b[k])).collect();
    let total: usize = perms.iter().map(|p| p.len()).product();
    if total > RELABEL_CAP {
        let mapping = identity_mapping(&groups_a, &groups_b, qa.arrows.len());
        if pa.map_arrows(|x| Some(mapping[x])) == pb {
            return QpComparison::Equal { mapping };
        }
        return QpComparison::Inconclusive;
    }
    let mut idx = vec![0usize; keys.len()];
    let mut signed = None;
    loop {
        let mut mapping = vec![0usize; qa.arrows.len()];
        for (g, k) in keys.iter().enumerate() {
            for (x, y) in groups_a[k].iter().zip(&perms[g][idx[g]]) {
                mapping[*x] = *y;
            }
        }
        let mapped = pa.map_arrows(|x| Some(mapping[x]));
        if mapped == pb {
            return QpComparison::Equal { mapping };
        }
        if signed.is_none() {
            if let Some(neg) = sign_change(&mapped, &pb, qa.arrows.len()) {
                let inverse: HashMap<usize, usize> =
                    mapping.iter().enumerate().map(|(i, &y)| (y, i)).collect();
                let negated = neg.iter().map(|y| inverse[y]).collect();
                signed = Some(QpComparison::EqualAfterSigns {
                    mapping: mapping.clone(),
                    negated,
                });
            }
        }
        let mut g = 0;
        loop {
            if g == keys.len() {
                return signed.unwrap_or(QpComparison::Inconclusive);
            }
            idx[g] += 1;
            if idx[g] < perms[g].len() {
                break;
            }
            idx[g] = 0;
            g += 1;
        }
    }
}

fn identity_mapping(
    ga: &BTreeMap<(usize, usize), Vec<usize>>,
    gb: &BTreeMap<(usize, usize), Vec<usize>>,
    len: usize,
) -> Vec<usize> {
    let mut mapping = vec![0; len];
    for (k, v) in ga {
        for (x, y) in v.iter().zip(&gb[k]) {
            mapping[*x] = *y;
        }
    }
    mapping
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let x = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, x);
            out.push(p);
        }
    }
    out
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::linalg::rat;

    pub fn arrow(id: &str, s: usize, t: usize) -> Arrow {
        Arrow {
            id: id.into(),
            source: s - 1,
            target: t - 1,
        }
    }

    /// alpha: 2 -> 1, beta: 3 -> 2, gamma: 1 -> 3 with S = alpha beta gamma.
    pub fn three_cycle() -> QP {
        let q = Quiver::new(
            3,
            0,
            vec![arrow("α", 2, 1), arrow("β", 3, 2), arrow("γ", 1, 3)],
        )
        .unwrap();
        QP::new(q, Potential::from_terms([(rat(1), vec![2, 1, 0])]), 12).unwrap()
    }

    /// The four-vertex example with one frozen vertex and S = abc - ade.
    pub fn two_triangles() -> QP {
        let q = Quiver::new(
            3,
            1,
            vec![
                arrow("α", 2, 1),
                arrow("β", 3, 2),
                arrow("γ", 1, 3),
                arrow("δ", 4, 2),
                arrow("ε", 1, 4),
            ],
        )
        .unwrap();
        QP::new(
            q,
            Potential::from_terms([(rat(1), vec![2, 1, 0]), (rat(-1), vec![4, 3, 0])]),
            12,
        )
        .unwrap()
    }

    fn paths(qp: &QP, lc: &LinComb) -> Vec<(String, Rat)> {
        lc.iter()
            .map(|(p, c)| (qp.path_label(p), c.clone()))
            .collect()
    }

    #[test]
    fn cyclic_derivatives() {
        let qp = two_triangles();
        // d/d alpha of (gamma, beta, alpha) - (epsilon, delta, alpha)
        let d = qp.cyclic_derivative(0);
        assert_eq!(
            paths(&qp, &d),
            vec![("γ,β".to_string(), rat(1)), ("ε,δ".to_string(), rat(-1))]
        );
        for a in 0..qp.quiver.arrows.len() {
            for p in qp.cyclic_derivative(a).keys() {
                let (s, t) = qp.quiver.path_endpoints(p).unwrap();
                assert_eq!((s, t), (qp.quiver.target(a), qp.quiver.source(a)));
            }
        }
        let r = qp.restrict();
        assert!(r.cyclic_derivative(3).is_empty() || r.quiver.arrows.len() == 3);
    }

    #[test]
    fn restriction() {
        let r = two_triangles().restrict();
        assert_eq!(r.quiver.arrows.len(), 3);
        assert_eq!(r.quiver.m, 0);
        assert_eq!(r.potential, three_cycle().potential);
        assert_eq!(three_cycle().restrict(), three_cycle());
    }

    #[test]
    fn b_matrix_of_extended_quiver() {
        let b = two_triangles().quiver.b_matrix();
        assert_eq!(
            b.rows,
            vec![
                vec![0, 1, -1],
                vec![-1, 0, 1],
                vec![1, -1, 0],
                vec![1, -1, 0]
            ]
        );
    }

    #[test]
    fn premutation_of_three_cycle() {
        let pm = three_cycle().premutate(0).unwrap();
        let ids: Vec<&str> = pm.qp.quiver.arrows.iter().map(|a| a.id.as_str()).collect();
        assert_eq!(ids, vec!["β", "[γα]", "α*", "γ*"]);
        let lab: Vec<(String, Rat)> = pm
            .qp
            .potential
            .terms()
            .iter()
            .map(|(c, x)| (pm.qp.path_label(c), x.clone()))
            .collect();
        assert_eq!(
            lab,
            vec![
                ("β,[γα]".to_string(), rat(1)),
                ("[γα],γ*,α*".to_string(), rat(1))
            ]
        );
    }

    #[test]
    fn premutation_preconditions() {
        let q = Quiver::new(2, 0, vec![arrow("a", 1, 2), arrow("b", 2, 1)]).unwrap();
        let qp = QP::new(q, Potential::new(), 12).unwrap();
        assert_eq!(qp.premutate(0).unwrap_err(), Error::TwoCycleAtK(1));
        let q = Quiver::new(1, 0, vec![arrow("l", 1, 1)]).unwrap();
        assert_eq!(
            QP::new(q, Potential::new(), 12)
                .unwrap()
                .premutate(0)
                .unwrap_err(),
            Error::LoopAtK(1)
        );
        assert_eq!(
            three_cycle().premutate(3).unwrap_err(),
            Error::KOutOfRange(4)
        );
    }

    #[test]
    fn premutation_sink_and_single_arrow() {
        let q = Quiver::new(2, 0, vec![arrow("a", 2, 1)]).unwrap();
        let qp = QP::new(q, Potential::new(), 12).unwrap();
        let pm = qp.premutate(0).unwrap();
        assert_eq!(pm.qp.quiver.arrows, vec![arrow("a*", 1, 2)]);
        assert!(pm.qp.potential.is_zero());
    }

    #[test]
    fn json_round_trip() {
        let qp = two_triangles();
        let j = serde_json::to_string(&qp.to_json()).unwrap();
        let back: QpJson = serde_json::from_str(&j).unwrap();
        assert_eq!(QP::from_json(&back).unwrap(), qp);
    }

    #[test]
    fn open_cycles_are_rejected() {
        let mut j = three_cycle().to_json();
        j.potential = vec![PotentialTermJson {
            coeff: "1".into(),
            cycle: vec!["α".into(), "β".into(), "γ".into()],
        }];
        assert!(matches!(QP::from_json(&j), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn principal_extension() {
        let pr = three_cycle().principal();
        assert_eq!(pr.quiver.m, 3);
        let b = pr.quiver.b_matrix();
        assert_eq!(b.rows[3..], [vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]);
    }
}
