//! Splitting off the trivial part of a QP and full QP mutation.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_traits::{One, Zero};

use super::{lin_add, LinComb, Potential, Premutated, Quiver, QP};
use crate::error::{Error, Result};
use crate::linalg::{rat, Rat, RatMatrix};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reduced {
    pub qp: QP,
    /// Indices (into the input QP) of the surviving arrows, in their new order.
    pub kept: Vec<usize>,
    /// Arrow pairs removed with the trivial part, `(u -> v, v -> u)`.
    pub pairs: Vec<(usize, usize)>,
    /// True when the substitution had not stabilized below the truncation.
    pub truncated: bool,
}

/// Removes every 2-cycle term of the potential by a truncated sequence of
/// unitriangular changes of arrows.
pub fn reduce_qp(qp: &QP) -> Result<Reduced> {
    let q = &qp.quiver;
    let p = qp.p;
    // Bundles of 2-cycle arrows per vertex pair.
    let mut bundles: BTreeMap<(usize, usize), (BTreeSet<usize>, BTreeSet<usize>)> = BTreeMap::new();
    for cyc in qp.potential.terms().keys().filter(|c| c.len() == 2) {
        let (a, b) = (cyc[0], cyc[1]);
        let (u, v) = (q.source(a), q.target(a));
        let (x, y) = if u < v { (a, b) } else { (b, a) };
        let e = bundles.entry((u.min(v), u.max(v))).or_default();
        e.0.insert(x);
        e.1.insert(y);
    }
    let mut pot = qp.potential.clone();
    let mut pairs = Vec::new();
    let mut change = HashMap::new();
    for (&(u, v), (xs, ys)) in &bundles {
        let xs: Vec<usize> = xs.iter().copied().collect();
        let ys: Vec<usize> = ys.iter().copied().collect();
        if xs.len() != ys.len() {
            return Err(Error::NonSplittable2Cycle(u + 1, v + 1));
        }
        let k = xs.len();
        let mut c = RatMatrix::zeros(k, k);
        for (i, &x) in xs.iter().enumerate() {
            for (j, &y) in ys.iter().enumerate() {
                let key = super::canonical_rotation(&[x, y]);
                if let Some(coef) = pot.terms().get(&key) {
                    c.set(i, j, coef.clone());
                }
            }
        }
        let inv = c
            .inverse()
            .ok_or(Error::NonSplittable2Cycle(u + 1, v + 1))?;
        // y_j -> sum_i inv[j][i] y_i turns sum C_ij x_i y_j into sum x_i y_i.
        for (j, &y) in ys.iter().enumerate() {
            let mut lc = LinComb::new();
            for (i, &yi) in ys.iter().enumerate() {
                lin_add(&mut lc, vec![yi], inv.get(j, i).clone());
            }
            change.insert(y, lc);
        }
        pairs.extend(xs.into_iter().zip(ys));
    }
    if !change.is_empty() {
        pot = pot.substitute(&change, p);
    }
    let partner: HashMap<usize, (usize, bool)> = pairs
        .iter()
        .flat_map(|&(x, y)| [(x, (y, true)), (y, (x, false))])
        .collect();
    let is_trivial = |a: &usize| partner.contains_key(a);
    let mut truncated = false;
    let mut rounds = 0;
    loop {
        let mixed: Vec<(Vec<usize>, Rat)> = pot
            .terms()
            .iter()
            .filter(|(c, _)| c.len() >= 3 && c.iter().any(is_trivial))
            .map(|(c, x)| (c.clone(), x.clone()))
            .collect();
        if mixed.is_empty() {
            break;
        }
        if rounds > p {
            truncated = true;
            break;
        }
        rounds += 1;
        // Attribute each mixed term to one trivial arrow: an x if present,
        // otherwise a y. x_k -> x_k - v_k and y_k -> y_k - u_k then cancel
        // the term to lowest order.
        let mut subs: HashMap<usize, LinComb> = HashMap::new();
        for (cyc, c) in &mixed {
            let pos = cyc
                .iter()
                .position(|a| partner.get(a).is_some_and(|&(_, is_x)| is_x))
                .or_else(|| cyc.iter().position(is_trivial))
                .unwrap();
            let rest: Vec<usize> = cyc[pos + 1..].iter().chain(&cyc[..pos]).copied().collect();
            let (other, _) = partner[&cyc[pos]];
            lin_add(subs.entry(other).or_default(), rest, -c.clone());
        }
        for (&a, lc) in subs.iter_mut() {
            lin_add(lc, vec![a], Rat::one());
        }
        pot = pot.substitute(&subs, p);
    }
    let kept: Vec<usize> = (0..q.arrows.len()).filter(|a| !is_trivial(a)).collect();
    let mut new_index = vec![None; q.arrows.len()];
    for (i, &a) in kept.iter().enumerate() {
        new_index[a] = Some(i);
    }
    let quiver = Quiver {
        n: q.n,
        m: q.m,
        arrows: kept.iter().map(|&a| q.arrows[a].clone()).collect(),
    };
    let potential = pot.map_arrows(|a| new_index[a]);
    Ok(Reduced {
        qp: QP {
            quiver,
            potential,
            p,
        },
        kept,
        pairs,
        truncated,
    })
}

/// Premutation followed by reduction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MutatedQp {
    pub premutated: Premutated,
    pub reduced: Reduced,
}

impl MutatedQp {
    pub fn qp(&self) -> &QP {
        &self.reduced.qp
    }
}

pub fn mutate_qp(qp: &QP, k: usize) -> Result<MutatedQp> {
    let premutated = qp.premutate(k)?;
    let reduced = reduce_qp(&premutated.qp)?;
    Ok(MutatedQp {
        premutated,
        reduced,
    })
}

/// Scales a potential's coefficients to one when a change of arrows by
/// scalars achieves it: each term gets its own free arrow to absorb the
/// coefficient, which is possible whenever terms share no arrows.
pub fn normalize_disjoint_coefficients(qp: &QP) -> Option<(Potential, Vec<Rat>)> {
    let mut scale = vec![Rat::one(); qp.quiver.arrows.len()];
    let mut used = BTreeSet::new();
    let mut out = Potential::new();
    for (cyc, c) in qp.potential.terms() {
        if cyc.iter().any(|a| !used.insert(*a)) {
            return None;
        }
        if c.is_zero() {
            continue;
        }
        scale[cyc[0]] = c.recip();
        out.add_cycle(rat(1), cyc);
    }
    Some((out, scale))
}

#[cfg(test)]
mod tests {
    use super::super::compare_up_to_relabeling;
    use super::super::tests::{arrow, three_cycle, two_triangles};
    use super::*;

    #[test]
    fn no_two_cycles_is_identity() {
        let r = reduce_qp(&three_cycle()).unwrap();
        assert_eq!(r.qp, three_cycle());
        assert!(r.pairs.is_empty());
        assert!(!r.truncated);
    }

    #[test]
    fn three_cycle_mutation() {
        let m = mutate_qp(&three_cycle(), 0).unwrap();
        let ids: Vec<&str> = m.qp().quiver.arrows.iter().map(|a| a.id.as_str()).collect();
        assert_eq!(ids, vec!["α*", "γ*"]);
        assert!(m.qp().potential.is_zero());
        let pm = &m.premutated.qp;
        let pairs: Vec<(&str, &str)> = m
            .reduced
            .pairs
            .iter()
            .map(|&(x, y)| {
                (
                    pm.quiver.arrows[x].id.as_str(),
                    pm.quiver.arrows[y].id.as_str(),
                )
            })
            .collect();
        assert_eq!(pairs, vec![("[γα]", "β")]);
    }

    #[test]
    fn double_mutation_returns_original() {
        for qp in [three_cycle(), two_triangles()] {
            for k in 0..3 {
                let once = mutate_qp(&qp, k).unwrap();
                let twice = mutate_qp(once.qp(), k).unwrap();
                let cmp = compare_up_to_relabeling(twice.qp(), &qp);
                assert!(cmp.is_equivalent(), "k={k}: {cmp:?}");
            }
        }
    }

    #[test]
    fn b_matrix_matches_matrix_mutation() {
        let qp = two_triangles();
        for k in 0..3 {
            let m = mutate_qp(&qp, k).unwrap();
            assert_eq!(
                m.qp().quiver.b_matrix(),
                qp.quiver.b_matrix().mutate(k).unwrap()
            );
        }
    }

    #[test]
    fn singular_bundle_is_rejected() {
        // Two parallel pairs with a rank-one coefficient matrix.
        let q = Quiver::new(
            2,
            0,
            vec![
                arrow("x1", 1, 2),
                arrow("x2", 1, 2),
                arrow("y1", 2, 1),
                arrow("y2", 2, 1),
            ],
        )
        .unwrap();
        let pot = Potential::from_terms([
            (rat(1), vec![0, 2]),
            (rat(1), vec![0, 3]),
            (rat(1), vec![1, 2]),
            (rat(1), vec![1, 3]),
        ]);
        let qp = QP::new(q, pot, 12).unwrap();
        assert_eq!(
            reduce_qp(&qp).unwrap_err(),
            Error::NonSplittable2Cycle(1, 2)
        );
    }

    #[test]
    fn higher_terms_are_cancelled() {
        // x y + x a b: the cubic term is absorbed by y -> y - a b.
        let q = Quiver::new(
            3,
            0,
            vec![
                arrow("x", 1, 2),
                arrow("y", 2, 1),
                arrow("a", 2, 3),
                arrow("b", 3, 1),
                arrow("c", 3, 2),
            ],
        )
        .unwrap();
        let pot = Potential::from_terms([(rat(1), vec![0, 1]), (rat(1), vec![0, 2, 3])]);
        let qp = QP::new(q, pot, 12).unwrap();
        let r = reduce_qp(&qp).unwrap();
        assert!(r.qp.potential.is_zero());
        assert_eq!(r.qp.quiver.arrows.len(), 3);
        // x y + x a b + y c d reduces to -a b c d.
        let q = Quiver::new(
            3,
            0,
            vec![
                arrow("x", 1, 2),
                arrow("y", 2, 1),
                arrow("a", 2, 3),
                arrow("b", 3, 1),
                arrow("c", 1, 3),
                arrow("d", 3, 2),
            ],
        )
        .unwrap();
        let pot = Potential::from_terms([
            (rat(1), vec![0, 1]),
            (rat(1), vec![0, 2, 3]),
            (rat(1), vec![1, 4, 5]),
        ]);
        let qp = QP::new(q, pot, 12).unwrap();
        let r = reduce_qp(&qp).unwrap();
        assert!(!r.truncated);
        assert_eq!(r.kept, vec![2, 3, 4, 5]);
        assert_eq!(
            r.qp.potential,
            Potential::from_terms([(rat(-1), vec![0, 1, 2, 3])])
        );
    }
}
