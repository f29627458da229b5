//! Exact rational feasibility for integer cones: the kernel-cone test, cone
//! membership with a bounded integer search, the induced order, and the
//! five-condition matrix report.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{clear_denominators, is_skew_symmetric, rat, rat_to_i64, Rat, RatMatrix};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome {
    Infeasible,
    Unbounded,
    Optimal { value: Rat, x: Vec<Rat> },
}

struct Tableau {
    t: Vec<Vec<Rat>>,
    basis: Vec<usize>,
    ncols: usize,
}

impl Tableau {
    fn rhs(&self, i: usize) -> &Rat {
        &self.t[i][self.ncols]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let inv = self.t[r][c].recip();
        for x in self.t[r].iter_mut() {
            *x *= &inv;
        }
        let prow = self.t[r].clone();
        for (i, row) in self.t.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, p) in row.iter_mut().zip(&prow) {
                if !p.is_zero() {
                    *x -= &f * p;
                }
            }
        }
        self.basis[r] = c;
    }

    /// Maximizes `obj` (indexed by column) using Bland's rule over columns
    /// `< allowed`. Returns false if unbounded.
    fn maximize(&mut self, obj: &[Rat], allowed: usize) -> bool {
        loop {
            let mut entering = None;
            for j in 0..allowed {
                if self.basis.contains(&j) {
                    continue;
                }
                let mut z = Rat::zero();
                for (i, &bv) in self.basis.iter().enumerate() {
                    if !obj[bv].is_zero() && !self.t[i][j].is_zero() {
                        z += &obj[bv] * &self.t[i][j];
                    }
                }
                if (&obj[j] - z).is_positive() {
                    entering = Some(j);
                    break;
                }
            }
            let Some(c) = entering else { return true };
            let mut leave: Option<(usize, Rat)> = None;
            for i in 0..self.t.len() {
                if self.t[i][c].is_positive() {
                    let ratio = self.rhs(i) / &self.t[i][c];
                    let better = match &leave {
                        None => true,
                        Some((li, lr)) => {
                            ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li])
                        }
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            let Some((r, _)) = leave else { return false };
            self.pivot(r, c);
        }
    }
}

/// Maximizes `c . x` subject to `A x = b`, `x >= 0`, in exact arithmetic.
pub fn lp_maximize(a: &RatMatrix, b: &[Rat], c: &[Rat]) -> LpOutcome {
    let m = a.nrows();
    let n = a.ncols();
    assert_eq!(b.len(), m);
    assert_eq!(c.len(), n);
    let total = n + m;
    let mut t = Vec::with_capacity(m);
    for i in 0..m {
        let neg = b[i].is_negative();
        let mut row = vec![Rat::zero(); total + 1];
        for j in 0..n {
            let v = a.get(i, j).clone();
            row[j] = if neg { -v } else { v };
        }
        row[n + i] = Rat::one();
        row[total] = if neg { -b[i].clone() } else { b[i].clone() };
        t.push(row);
    }
    let mut tab = Tableau {
        t,
        basis: (n..total).collect(),
        ncols: total,
    };
    let mut phase1 = vec![Rat::zero(); total];
    for x in phase1.iter_mut().skip(n) {
        *x = rat(-1);
    }
    tab.maximize(&phase1, total);
    let infeas: Rat = (0..m)
        .filter(|&i| tab.basis[i] >= n)
        .map(|i| tab.rhs(i).clone())
        .sum();
    if infeas.is_positive() {
        return LpOutcome::Infeasible;
    }
    // Drive remaining artificial variables out of the basis.
    let mut i = 0;
    while i < tab.t.len() {
        if tab.basis[i] >= n {
            if let Some(j) = (0..n).find(|&j| !tab.t[i][j].is_zero()) {
                tab.pivot(i, j);
            } else {
                tab.t.remove(i);
                tab.basis.remove(i);
                continue;
            }
        }
        i += 1;
    }
    let mut obj = c.to_vec();
    obj.extend(std::iter::repeat_n(Rat::zero(), m));
    if !tab.maximize(&obj, n) {
        return LpOutcome::Unbounded;
    }
    let mut x = vec![Rat::zero(); n];
    for (i, &bv) in tab.basis.iter().enumerate() {
        if bv < n {
            x[bv] = tab.rhs(i).clone();
        }
    }
    let value = x.iter().zip(c).map(|(a, b)| a * b).sum();
    LpOutcome::Optimal { value, x }
}

/// Some `x >= 0` with `A x = b`, if one exists.
pub fn lp_feasible(a: &RatMatrix, b: &[Rat]) -> Option<Vec<Rat>> {
    match lp_maximize(a, b, &vec![Rat::zero(); a.ncols()]) {
        LpOutcome::Optimal { x, .. } => Some(x),
        _ => None,
    }
}

/// Some `y` (free sign) with `B y >= 1` entrywise.
fn strictly_positive_image(b: &RatMatrix) -> Option<Vec<Rat>> {
    let n = b.ncols();
    let rows = b.nrows();
    // Variables: p (n), q (n), s (rows);  B p - B q - s = 1.
    let mut a = RatMatrix::zeros(rows, 2 * n + rows);
    for i in 0..rows {
        for j in 0..n {
            a.set(i, j, b.get(i, j).clone());
            a.set(i, n + j, -b.get(i, j).clone());
        }
        a.set(i, 2 * n + i, rat(-1));
    }
    let x = lp_feasible(&a, &vec![Rat::one(); rows])?;
    Some((0..n).map(|j| &x[j] - &x[n + j]).collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum KernelConeCertificate {
    /// A nonzero nonnegative integer vector in the kernel.
    NonnegativeKernelVector { vector: Vec<String> },
    /// A vector y with B y strictly positive (Gordan alternative).
    PositiveImage { y: Vec<String>, image: Vec<String> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KernelConeReport {
    pub trivial: bool,
    pub certificate: KernelConeCertificate,
}

impl KernelConeReport {
    pub fn kernel_vector(&self) -> Option<Vec<i64>> {
        match &self.certificate {
            KernelConeCertificate::NonnegativeKernelVector { vector } => {
                Some(vector.iter().map(|s| s.parse().unwrap()).collect())
            }
            _ => None,
        }
    }
}

fn check_skew(b: &[Vec<i64>]) -> Result<()> {
    if b.iter().any(|r| r.len() != b.len()) {
        return Err(Error::NotSquare);
    }
    if !is_skew_symmetric(b) {
        return Err(Error::NotSkewSymmetric);
    }
    Ok(())
}

/// Decides whether `Ker(B)` meets the nonnegative orthant only at zero.
pub fn kernel_cone_trivial(b: &[Vec<i64>]) -> Result<KernelConeReport> {
    check_skew(b)?;
    let n = b.len();
    let bm = RatMatrix::from_i64(b);
    let mut rows = bm.to_rows();
    rows.push(vec![Rat::one(); n]);
    let a = RatMatrix::from_rows_with_cols(rows, n);
    let mut rhs = vec![Rat::zero(); n];
    rhs.push(Rat::one());
    if let Some(x) = lp_feasible(&a, &rhs) {
        let v = clear_denominators(&x);
        return Ok(KernelConeReport {
            trivial: false,
            certificate: KernelConeCertificate::NonnegativeKernelVector {
                vector: v.iter().map(|x| x.to_string()).collect(),
            },
        });
    }
    let y = strictly_positive_image(&bm).expect("Gordan alternative must hold");
    let image = bm.mul_vec(&y);
    Ok(KernelConeReport {
        trivial: true,
        certificate: KernelConeCertificate::PositiveImage {
            y: y.iter().map(crate::linalg::fmt_rat).collect(),
            image: image.iter().map(crate::linalg::fmt_rat).collect(),
        },
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "result", rename_all = "camelCase")]
pub enum ConeMembership {
    Feasible { u: Vec<i64> },
    Infeasible,
    UnknownWithinBound,
}

const ENUMERATION_CAP: u128 = 2_000_000;

/// Searches for `u` in `Z_{>=0}^n`, entries at most `bound`, with `B u = t`.
pub fn cone_membership(t: &[i64], b: &[Vec<i64>], bound: u64) -> Result<ConeMembership> {
    if bound == 0 {
        return Err(Error::BoundZero);
    }
    let n = b.len();
    if b.iter().any(|r| r.len() != n) {
        return Err(Error::NotSquare);
    }
    if t.len() != n {
        return Err(Error::ShapeMismatch(format!(
            "target has length {}, matrix is {n}x{n}",
            t.len()
        )));
    }
    if t.iter().all(|&x| x == 0) {
        return Ok(ConeMembership::Feasible { u: vec![0; n] });
    }
    let bm = RatMatrix::from_i64(b);
    let tr: Vec<Rat> = t.iter().map(|&x| rat(x)).collect();
    if lp_feasible(&bm, &tr).is_none() {
        return Ok(ConeMembership::Infeasible);
    }
    let bound_r = rat(bound as i64);
    // Per-coordinate LP maxima decide whether the search box is exhaustive.
    let mut exhaustive = true;
    let mut upper = vec![bound as i64; n];
    for j in 0..n {
        let mut c = vec![Rat::zero(); n];
        c[j] = Rat::one();
        match lp_maximize(&bm, &tr, &c) {
            LpOutcome::Optimal { value, .. } => {
                if value > bound_r {
                    exhaustive = false;
                } else {
                    upper[j] = rat_to_i64(&value.floor()).unwrap();
                }
            }
            LpOutcome::Unbounded => exhaustive = false,
            LpOutcome::Infeasible => unreachable!("feasibility already established"),
        }
    }
    let aug = RatMatrix::hstack(&[&bm, &RatMatrix::from_cols(&[tr], n)], n);
    let rr = aug.rref();
    let pivots = rr.pivots.clone();
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    let space: u128 = free.iter().map(|&f| upper[f] as u128 + 1).product();
    if space > ENUMERATION_CAP {
        return Ok(ConeMembership::UnknownWithinBound);
    }
    let mut vals = vec![0i64; free.len()];
    loop {
        let mut u = vec![Rat::zero(); n];
        for (k, &f) in free.iter().enumerate() {
            u[f] = rat(vals[k]);
        }
        let mut ok = true;
        for (i, &p) in pivots.iter().enumerate() {
            let mut v = rr.r.get(i, n).clone();
            for (k, &f) in free.iter().enumerate() {
                if vals[k] != 0 {
                    v -= rr.r.get(i, f) * rat(vals[k]);
                }
            }
            if !v.is_integer() || v.is_negative() || v > bound_r {
                ok = false;
                break;
            }
            u[p] = v;
        }
        if ok {
            let u: Vec<i64> = u.iter().map(|x| rat_to_i64(x).unwrap()).collect();
            return Ok(ConeMembership::Feasible { u });
        }
        // Odometer over the free coordinates.
        let mut k = 0;
        loop {
            if k == free.len() {
                return Ok(if exhaustive {
                    ConeMembership::Infeasible
                } else {
                    ConeMembership::UnknownWithinBound
                });
            }
            if vals[k] < upper[free[k]] {
                vals[k] += 1;
                break;
            }
            vals[k] = 0;
            k += 1;
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Order {
    Less,
    Greater,
    Equal,
    Incomparable,
    Unknown,
}

/// Compares `a` and `b` under `a <= b  iff  a - b in B(Z_{>=0}^n)`.
pub fn order_compare(a: &[i64], b: &[i64], bm: &[Vec<i64>], bound: u64) -> Result<Order> {
    if !kernel_cone_trivial(bm)?.trivial {
        return Err(Error::NotAPartialOrder);
    }
    if a.len() != bm.len() || b.len() != bm.len() {
        return Err(Error::ShapeMismatch(
            "vector length differs from matrix size".into(),
        ));
    }
    if a == b {
        return Ok(Order::Equal);
    }
    let d: Vec<i64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let nd: Vec<i64> = d.iter().map(|x| -x).collect();
    let fwd = cone_membership(&d, bm, bound)?;
    let back = cone_membership(&nd, bm, bound)?;
    Ok(match (fwd, back) {
        (ConeMembership::Feasible { .. }, ConeMembership::Feasible { .. }) => {
            return Err(Error::Precondition(
                "both directions comparable for distinct vectors".into(),
            ))
        }
        (ConeMembership::Feasible { .. }, _) => Order::Less,
        (_, ConeMembership::Feasible { .. }) => Order::Greater,
        (ConeMembership::Infeasible, ConeMembership::Infeasible) => Order::Incomparable,
        _ => Order::Unknown,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ColumnCombination {
    pub column: usize,
    pub coefficients: Vec<(usize, String)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConditionsReport {
    pub n: usize,
    pub rank: usize,
    pub full_rank: bool,
    /// `None` when the subset enumeration was skipped (n > 12).
    pub column_condition: Option<bool>,
    pub column_witness: Vec<ColumnCombination>,
    pub positive_image: bool,
    pub kernel_cone_rational: bool,
    pub kernel_cone_integer: bool,
    pub implications_hold: bool,
    pub kernel_certificate: KernelConeCertificate,
}

/// Nonnegative coefficients expressing column `target` through `others`.
pub fn nonnegative_combination(
    bm: &RatMatrix,
    target: usize,
    others: &[usize],
) -> Option<Vec<Rat>> {
    let a = bm.select_cols(others);
    lp_feasible(&a, &bm.col(target))
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

fn column_condition(bm: &RatMatrix, rank: usize) -> (bool, Vec<ColumnCombination>) {
    let n = bm.ncols();
    if (0..n).any(|j| bm.col(j).iter().all(|x| x.is_zero())) {
        return (false, Vec::new());
    }
    let corank = n - rank;
    'subsets: for s in combinations(n, corank) {
        let rest: Vec<usize> = (0..n).filter(|j| !s.contains(j)).collect();
        let mut witness = Vec::new();
        for &j in &s {
            match nonnegative_combination(bm, j, &rest) {
                Some(c) => witness.push(ColumnCombination {
                    column: j,
                    coefficients: rest
                        .iter()
                        .zip(&c)
                        .filter(|(_, x)| !x.is_zero())
                        .map(|(&i, x)| (i, crate::linalg::fmt_rat(x)))
                        .collect(),
                }),
                None => continue 'subsets,
            }
        }
        return (true, witness);
    }
    (false, Vec::new())
}

pub fn matrix_conditions_report(b: &[Vec<i64>]) -> Result<ConditionsReport> {
    check_skew(b)?;
    let n = b.len();
    let bm = RatMatrix::from_i64(b);
    let rank = bm.rank();
    let full_rank = rank == n;
    let (column_condition, column_witness) = if n <= 12 {
        let (ok, w) = column_condition(&bm, rank);
        (Some(ok), w)
    } else {
        (None, Vec::new())
    };
    let positive_image = strictly_positive_image(&bm).is_some();
    let kc = kernel_cone_trivial(b)?;
    let kernel_cone_integer = match &kc.certificate {
        KernelConeCertificate::NonnegativeKernelVector { vector } => {
            // The certificate is already a nonzero vector in Z_{>=0}^n.
            !vector
                .iter()
                .all(|s| s.parse::<BigInt>().is_ok_and(|x| !x.is_negative()))
        }
        KernelConeCertificate::PositiveImage { .. } => true,
    };
    let imp = |p: bool, q: bool| !p || q;
    let implications_hold = imp(full_rank, column_condition.unwrap_or(positive_image))
        && imp(column_condition.unwrap_or(positive_image), positive_image)
        && imp(positive_image, kc.trivial)
        && kc.trivial == kernel_cone_integer;
    Ok(ConditionsReport {
        n,
        rank,
        full_rank,
        column_condition,
        column_witness,
        positive_image,
        kernel_cone_rational: kc.trivial,
        kernel_cone_integer,
        implications_hold,
        kernel_certificate: kc.certificate,
    })
}
