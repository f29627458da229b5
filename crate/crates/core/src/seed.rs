//! Exchange matrices, seeds and their mutation, principal coefficients and
//! the coefficient specialization map.

use std::collections::{BTreeMap, HashSet};

use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::cone::{kernel_cone_trivial, KernelConeReport};
use crate::error::{Error, Result};
use crate::laurent::{LaurentPoly, MonomialAssignment};
use crate::linalg::Rat;

/// An (n+m) x n integer matrix whose top n x n block is skew-symmetric.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ExchangeMatrix {
    pub n: usize,
    #[serde(default)]
    pub m: usize,
    pub rows: Vec<Vec<i64>>,
}

impl ExchangeMatrix {
    pub fn new(n: usize, m: usize, rows: Vec<Vec<i64>>) -> Result<Self> {
        let b = ExchangeMatrix { n, m, rows };
        b.validate()?;
        Ok(b)
    }

    /// A square skew-symmetric matrix with no frozen rows.
    pub fn square(rows: Vec<Vec<i64>>) -> Result<Self> {
        Self::new(rows.len(), 0, rows)
    }

    pub fn validate(&self) -> Result<()> {
        if self.rows.len() != self.n + self.m || self.rows.iter().any(|r| r.len() != self.n) {
            return Err(Error::ShapeMismatch(format!(
                "expected {}x{} exchange matrix",
                self.n + self.m,
                self.n
            )));
        }
        for i in 0..self.n {
            for j in 0..self.n {
                if self.rows[i][j] != -self.rows[j][i] {
                    return Err(Error::NotSkewSymmetric);
                }
            }
        }
        Ok(())
    }

    pub fn total(&self) -> usize {
        self.n + self.m
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.rows[i][j]
    }

    pub fn principal(&self) -> Vec<Vec<i64>> {
        self.rows[..self.n].to_vec()
    }

    pub fn frozen_block(&self) -> Vec<Vec<i64>> {
        self.rows[self.n..].to_vec()
    }

    pub fn column(&self, j: usize) -> Vec<i64> {
        self.rows.iter().map(|r| r[j]).collect()
    }

    fn check_k(&self, k: usize) -> Result<()> {
        if k >= self.n {
            return Err(Error::KOutOfRange(k + 1));
        }
        Ok(())
    }

    /// Matrix mutation at the mutable index `k` (0-based).
    pub fn mutate(&self, k: usize) -> Result<Self> {
        self.check_k(k)?;
        let mut rows = self.rows.clone();
        for (i, row) in rows.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                let b = self.rows[i][j];
                *x = if i == k || j == k {
                    -b
                } else {
                    let bik = self.rows[i][k];
                    b + bik.signum() * (bik * self.rows[k][j]).max(0)
                };
            }
        }
        Ok(ExchangeMatrix {
            n: self.n,
            m: self.m,
            rows,
        })
    }

    pub fn mutate_seq(&self, seq: &[usize]) -> Result<Self> {
        seq.iter().try_fold(self.clone(), |b, &k| b.mutate(k))
    }

    /// The two monomials of the exchange relation at `k`, as exponent vectors:
    /// incoming arrows (b_ik > 0) and outgoing arrows (b_ik < 0).
    pub fn exchange_exponents(&self, k: usize) -> Result<(Vec<i64>, Vec<i64>)> {
        self.check_k(k)?;
        let col = self.column(k);
        let plus = col.iter().map(|&b| b.max(0)).collect();
        let minus = col.iter().map(|&b| (-b).max(0)).collect();
        Ok((plus, minus))
    }

    /// The exchange binomial at `k` in the initial variables.
    pub fn exchange_binomial(&self, k: usize) -> Result<LaurentPoly> {
        let (p, q) = self.exchange_exponents(k)?;
        Ok(&LaurentPoly::monomial(p, Rat::one()) + &LaurentPoly::monomial(q, Rat::one()))
    }
}

/// B stacked over the n x n identity.
pub fn principal_matrix(b: &[Vec<i64>]) -> Result<ExchangeMatrix> {
    let n = b.len();
    let mut rows = b.to_vec();
    for i in 0..n {
        let mut r = vec![0; n];
        r[i] = 1;
        rows.push(r);
    }
    ExchangeMatrix::new(n, n, rows)
}

/// The map x_j -> x_j (j <= n), y_j -> prod_{i > n} x_i^{b_ij} from the
/// principal-coefficient variables (x_1..x_n, y_1..y_n) to those of `bt`.
pub fn specialization_phi(bt: &ExchangeMatrix) -> MonomialAssignment {
    let n = bt.n;
    let total = bt.total();
    let mut images = Vec::with_capacity(2 * n);
    for j in 0..n {
        let mut e = vec![0; total];
        e[j] = 1;
        images.push(e);
    }
    for j in 0..n {
        let mut e = vec![0; total];
        for i in n..total {
            e[i] = bt.rows[i][j];
        }
        images.push(e);
    }
    MonomialAssignment::from_exponents(total, images)
}

/// A seed: exchange matrix plus cluster, stored as Laurent polynomials in the
/// initial variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Seed {
    pub matrix: ExchangeMatrix,
    pub cluster: Vec<LaurentPoly>,
}

impl Seed {
    pub fn initial(matrix: ExchangeMatrix) -> Self {
        let t = matrix.total();
        let cluster = (0..t).map(|i| LaurentPoly::var(t, i)).collect();
        Seed { matrix, cluster }
    }

    pub fn mutate(&self, k: usize) -> Result<Self> {
        let (plus, minus) = self.matrix.exchange_exponents(k)?;
        let t = self.matrix.total();
        let product = |e: &[i64]| {
            let mut acc = LaurentPoly::one(t);
            for (i, &p) in e.iter().enumerate() {
                if p > 0 {
                    acc = &acc * &self.cluster[i].pow(p as u32);
                }
            }
            acc
        };
        let numer = &product(&plus) + &product(&minus);
        let uk = numer
            .exact_div(&self.cluster[k])
            .ok_or(Error::NonLaurentResult)?;
        let mut cluster = self.cluster.clone();
        cluster[k] = uk;
        Ok(Seed {
            matrix: self.matrix.mutate(k)?,
            cluster,
        })
    }

    pub fn mutate_seq(&self, seq: &[usize]) -> Result<Self> {
        seq.iter().try_fold(self.clone(), |s, &k| s.mutate(k))
    }

    pub fn to_json(&self) -> SeedJson {
        SeedJson {
            matrix: self.matrix.clone(),
            cluster: self.cluster.iter().map(|c| c.to_string()).collect(),
        }
    }

    pub fn from_json(j: &SeedJson) -> Result<Self> {
        j.matrix.validate()?;
        let t = j.matrix.total();
        if j.cluster.len() != t {
            return Err(Error::ShapeMismatch("cluster length".into()));
        }
        let cluster = j
            .cluster
            .iter()
            .map(|s| LaurentPoly::parse(t, s))
            .collect::<Result<Vec<_>>>()?;
        Ok(Seed {
            matrix: j.matrix.clone(),
            cluster,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedJson {
    pub matrix: ExchangeMatrix,
    pub cluster: Vec<String>,
}

/// Entry `j` (0-based) of the cluster reached from the initial seed by `seq`.
pub fn cluster_variable(bt: &ExchangeMatrix, seq: &[usize], j: usize) -> Result<LaurentPoly> {
    if j >= bt.total() {
        return Err(Error::KOutOfRange(j + 1));
    }
    Ok(Seed::initial(bt.clone()).mutate_seq(seq)?.cluster[j].clone())
}

/// Every mutable cluster variable reachable by at most `depth` mutations,
/// keyed by its first discovery (mutation sequence, position).
pub fn enumerate_cluster_variables(
    bt: &ExchangeMatrix,
    depth: usize,
) -> Result<BTreeMap<String, (Vec<usize>, usize, LaurentPoly)>> {
    let mut found = BTreeMap::new();
    let start = Seed::initial(bt.clone());
    let mut seen: HashSet<Seed> = HashSet::new();
    seen.insert(start.clone());
    let mut frontier = vec![(start, Vec::<usize>::new())];
    for level in 0..=depth {
        let mut next = Vec::new();
        for (seed, seq) in &frontier {
            for j in 0..bt.n {
                let key = seed.cluster[j].to_string();
                found
                    .entry(key)
                    .or_insert_with(|| (seq.clone(), j, seed.cluster[j].clone()));
            }
            if level == depth {
                continue;
            }
            for k in 0..bt.n {
                if seq.last() == Some(&k) {
                    continue;
                }
                let s = seed.mutate(k)?;
                if seen.insert(s.clone()) {
                    let mut sq = seq.clone();
                    sq.push(k);
                    next.push((s, sq));
                }
            }
        }
        frontier = next;
    }
    Ok(found)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IndependenceReport {
    pub independent: bool,
    pub kernel: KernelConeReport,
    /// 0-based positions of two equal g-vectors, if any.
    pub duplicate: Option<(usize, usize)>,
}

/// Checks the two sufficient conditions for linear independence of CC
/// functions: the kernel-cone condition on B and pairwise distinct g-vectors.
pub fn certify_independence(b: &[Vec<i64>], gvectors: &[Vec<i64>]) -> Result<IndependenceReport> {
    let kernel = kernel_cone_trivial(b)?;
    let mut duplicate = None;
    'outer: for i in 0..gvectors.len() {
        for j in i + 1..gvectors.len() {
            if gvectors[i] == gvectors[j] {
                duplicate = Some((i, j));
                break 'outer;
            }
        }
    }
    Ok(IndependenceReport {
        independent: kernel.trivial && duplicate.is_none(),
        kernel,
        duplicate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bt3() -> ExchangeMatrix {
        ExchangeMatrix::new(2, 1, vec![vec![0, 1], vec![-1, 0], vec![1, -1]]).unwrap()
    }

    fn lp(n: usize, s: &str) -> LaurentPoly {
        LaurentPoly::parse(n, s).unwrap()
    }

    #[test]
    fn matrix_mutation_examples() {
        let b = ExchangeMatrix::square(vec![vec![0, 1], vec![-1, 0]]).unwrap();
        assert_eq!(b.mutate(0).unwrap().rows, vec![vec![0, -1], vec![1, 0]]);
        assert_eq!(
            bt3().mutate(1).unwrap().rows,
            vec![vec![0, -1], vec![1, 0], vec![0, 1]]
        );
        assert_eq!(bt3().mutate_seq(&[1, 1]).unwrap(), bt3());
        assert_eq!(bt3().mutate(2).unwrap_err(), Error::KOutOfRange(3));
    }

    #[test]
    fn rejects_bad_matrices() {
        assert_eq!(
            ExchangeMatrix::square(vec![vec![0, 1], vec![1, 0]]).unwrap_err(),
            Error::NotSkewSymmetric
        );
        assert!(matches!(
            ExchangeMatrix::new(2, 1, vec![vec![0, 1]]),
            Err(Error::ShapeMismatch(_))
        ));
    }

    #[test]
    fn seed_mutation_examples() {
        let s = Seed::initial(bt3()).mutate(0).unwrap();
        assert_eq!(s.cluster[0], lp(3, "x1^-1 x2 + x1^-1 x3"));
        assert_eq!(
            Seed::initial(bt3()).mutate_seq(&[0, 0]).unwrap(),
            Seed::initial(bt3())
        );
        assert_eq!(cluster_variable(&bt3(), &[], 0).unwrap(), lp(3, "x1"));
        assert_eq!(cluster_variable(&bt3(), &[1, 1], 1).unwrap(), lp(3, "x2"));
    }

    #[test]
    fn a2_period_five() {
        let b = ExchangeMatrix::square(vec![vec![0, 1], vec![-1, 0]]).unwrap();
        let s = Seed::initial(b.clone())
            .mutate_seq(&[0, 1, 0, 1, 0])
            .unwrap();
        let mut got = s.cluster.clone();
        got.sort_by_key(|p| p.to_string());
        let mut want = Seed::initial(b.clone()).cluster;
        want.sort_by_key(|p| p.to_string());
        assert_eq!(got, want);
        let vars = enumerate_cluster_variables(&b, 6).unwrap();
        assert_eq!(vars.len(), 5);
    }

    #[test]
    fn principal_and_phi() {
        assert_eq!(
            principal_matrix(&[vec![0]]).unwrap().rows,
            vec![vec![0], vec![1]]
        );
        let bt = ExchangeMatrix::new(
            3,
            1,
            vec![
                vec![0, 1, -1],
                vec![-1, 0, 1],
                vec![1, -1, 0],
                vec![1, -1, 0],
            ],
        )
        .unwrap();
        let phi = specialization_phi(&bt);
        let imgs: Vec<Vec<i64>> = phi.images.iter().map(|(e, _)| e.clone()).collect();
        assert_eq!(imgs[3], vec![0, 0, 0, 1]);
        assert_eq!(imgs[4], vec![0, 0, 0, -1]);
        assert_eq!(imgs[5], vec![0, 0, 0, 0]);
        let sq = ExchangeMatrix::square(vec![vec![0, 1], vec![-1, 0]]).unwrap();
        assert!(specialization_phi(&sq).images[2..]
            .iter()
            .all(|(e, _)| e.iter().all(|&x| x == 0)));
        let prin = principal_matrix(&sq.rows).unwrap();
        let phi = specialization_phi(&prin);
        assert_eq!(phi.images[2].0, vec![0, 0, 1, 0]);
        assert_eq!(phi.images[3].0, vec![0, 0, 0, 1]);
    }

    #[test]
    fn independence_examples() {
        let markov = vec![vec![0, 2, -2], vec![-2, 0, 2], vec![2, -2, 0]];
        assert!(
            certify_independence(&[vec![0, 1], vec![-1, 0]], &[])
                .unwrap()
                .independent
        );
        assert!(
            !certify_independence(&markov, &[vec![1, 0, 0]])
                .unwrap()
                .independent
        );
        let ann = vec![vec![0, 1, 1], vec![-1, 0, -1], vec![-1, 1, 0]];
        assert!(
            certify_independence(&ann, &[vec![0, -1, 1], vec![1, 0, 0]])
                .unwrap()
                .independent
        );
        let r = certify_independence(&ann, &[vec![1, 0, 0], vec![1, 0, 0]]).unwrap();
        assert_eq!(r.duplicate, Some((0, 1)));
    }

    fn quiver_matrix() -> impl Strategy<Value = ExchangeMatrix> {
        (2usize..=4).prop_flat_map(|n| {
            prop::collection::vec(-2i64..=2, n * (n - 1) / 2 + n).prop_map(move |v| {
                let mut rows = vec![vec![0; n]; n + 1];
                let mut it = v.into_iter();
                for i in 0..n {
                    for j in i + 1..n {
                        let x = it.next().unwrap();
                        rows[i][j] = x;
                        rows[j][i] = -x;
                    }
                }
                for j in 0..n {
                    rows[n][j] = it.next().unwrap();
                }
                ExchangeMatrix::new(n, 1, rows).unwrap()
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn matrix_mutation_is_involutive(b in quiver_matrix(), k in 0usize..4) {
            let k = k % b.n;
            let once = b.mutate(k).unwrap();
            prop_assert!(once.validate().is_ok());
            prop_assert_eq!(once.mutate(k).unwrap(), b);
        }

        #[test]
        fn laurent_phenomenon(b in quiver_matrix(), seq in prop::collection::vec(0usize..4, 0..=8)) {
            let seq: Vec<usize> = seq.into_iter().map(|k| k % b.n).collect();
            // Entries blow up quickly for dense quivers; cap the work.
            prop_assume!(b.rows.iter().flatten().map(|x| x.abs()).sum::<i64>() <= 6 || seq.len() <= 4);
            let s = Seed::initial(b.clone()).mutate_seq(&seq).unwrap();
            for c in &s.cluster {
                prop_assert!(c.has_integer_coefficients());
            }
            let k = seq.last().copied().unwrap_or(0);
            prop_assert_eq!(s.mutate(k).unwrap().mutate(k).unwrap(), s);
        }
    }
}
