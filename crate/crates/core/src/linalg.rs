//! Exact rational matrices: echelon forms, kernels, inverses, solving.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rat = BigRational;
pub type IntVector = Vec<i64>;

pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn frac(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Parses "p", "-p" or "p/q".
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            Ok(Rat::new(p, q))
        }
        None => Ok(Rat::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

pub fn fmt_rat(r: &Rat) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Converts an integral rational to `i64`.
pub fn rat_to_i64(r: &Rat) -> Option<i64> {
    if r.is_integer() {
        r.numer().to_i64()
    } else {
        None
    }
}

/// Scales a rational vector to a primitive integer vector whose first
/// nonzero entry is positive.
pub fn clear_denominators(v: &[Rat]) -> Vec<BigInt> {
    let mut l = BigInt::one();
    for x in v {
        l = l.lcm(x.denom());
    }
    let mut ints: Vec<BigInt> = v.iter().map(|x| x.numer() * (&l / x.denom())).collect();
    let mut g = BigInt::zero();
    for x in &ints {
        g = g.gcd(x);
    }
    if !g.is_zero() {
        let first_negative = ints
            .iter()
            .find(|x| !x.is_zero())
            .is_some_and(|x| x.is_negative());
        if first_negative {
            g = -g;
        }
        for x in ints.iter_mut() {
            *x = &*x / &g;
        }
    }
    ints
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rat>,
}

impl fmt::Debug for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            let row: Vec<String> = (0..self.cols).map(|j| fmt_rat(self.get(i, j))).collect();
            write!(f, "[{}]", row.join(", "))?;
        }
        write!(f, "]")?;
        if self.rows == 0 || self.cols == 0 {
            write!(f, " ({}x{})", self.rows, self.cols)?;
        }
        Ok(())
    }
}

/// Reduced row echelon form together with rank and pivot columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rref {
    pub r: RatMatrix,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix {
            rows,
            cols,
            data: vec![Rat::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rat::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        RatMatrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    /// Like `from_rows` but keeps the column count for empty row lists.
    pub fn from_rows_with_cols(rows: Vec<Vec<Rat>>, cols: usize) -> Self {
        if rows.is_empty() {
            Self::zeros(0, cols)
        } else {
            Self::from_rows(rows)
        }
    }

    pub fn from_i64(rows: &[Vec<i64>]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| rat(x)).collect())
                .collect(),
        )
    }

    pub fn from_cols(cols: &[Vec<Rat>], rows: usize) -> Self {
        let mut m = Self::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), rows);
            for (i, x) in c.iter().enumerate() {
                m.set(i, j, x.clone());
            }
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rat {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rat) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> Vec<Rat> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn col(&self, j: usize) -> Vec<Rat> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Rat>> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn entries(&self) -> impl Iterator<Item = &Rat> {
        self.data.iter()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &RatMatrix) -> RatMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let idx = i * out.cols + j;
                        out.data[idx] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Rat]) -> Vec<Rat> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut s = Rat::zero();
                for (j, x) in v.iter().enumerate() {
                    if !x.is_zero() {
                        s += self.get(i, j) * x;
                    }
                }
                s
            })
            .collect()
    }

    pub fn add(&self, other: &RatMatrix) -> RatMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        RatMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &RatMatrix) -> RatMatrix {
        self.add(&other.scale(&rat(-1)))
    }

    pub fn scale(&self, c: &Rat) -> RatMatrix {
        RatMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * c).collect(),
        }
    }

    pub fn hstack(blocks: &[&RatMatrix], rows: usize) -> RatMatrix {
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut out = Self::zeros(rows, cols);
        let mut off = 0;
        for b in blocks {
            assert_eq!(b.rows, rows);
            out.set_block(0, off, b);
            off += b.cols;
        }
        out
    }

    pub fn vstack(blocks: &[&RatMatrix], cols: usize) -> RatMatrix {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let mut out = Self::zeros(rows, cols);
        let mut off = 0;
        for b in blocks {
            assert_eq!(b.cols, cols);
            out.set_block(off, 0, b);
            off += b.rows;
        }
        out
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, b: &RatMatrix) {
        for i in 0..b.rows {
            for j in 0..b.cols {
                self.set(r0 + i, c0 + j, b.get(i, j).clone());
            }
        }
    }

    pub fn block(&self, r0: usize, nr: usize, c0: usize, nc: usize) -> RatMatrix {
        let mut out = Self::zeros(nr, nc);
        for i in 0..nr {
            for j in 0..nc {
                out.set(i, j, self.get(r0 + i, c0 + j).clone());
            }
        }
        out
    }

    pub fn select_cols(&self, cols: &[usize]) -> RatMatrix {
        let mut out = Self::zeros(self.rows, cols.len());
        for (jj, &j) in cols.iter().enumerate() {
            for i in 0..self.rows {
                out.set(i, jj, self.get(i, j).clone());
            }
        }
        out
    }

    pub fn select_rows(&self, rows: &[usize]) -> RatMatrix {
        let mut out = Self::zeros(rows.len(), self.cols);
        for (ii, &i) in rows.iter().enumerate() {
            for j in 0..self.cols {
                out.set(ii, j, self.get(i, j).clone());
            }
        }
        out
    }

    pub fn rref(&self) -> Rref {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(p) = (row..m.rows).find(|&i| !m.get(i, col).is_zero()) else {
                continue;
            };
            m.swap_rows(row, p);
            let inv = m.get(row, col).recip();
            for j in col..m.cols {
                let v = m.get(row, j) * &inv;
                m.set(row, j, v);
            }
            for i in 0..m.rows {
                if i == row || m.get(i, col).is_zero() {
                    continue;
                }
                let f = m.get(i, col).clone();
                for j in col..m.cols {
                    let s = m.get(row, j);
                    if !s.is_zero() {
                        let v = m.get(i, j) - &f * s;
                        m.set(i, j, v);
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        Rref {
            r: m,
            rank: pivots.len(),
            pivots,
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().rank
    }

    /// Pivot-canonical null space basis over Q: one vector per free column,
    /// with that free variable equal to 1 and the other free variables 0.
    pub fn kernel_rational(&self) -> Vec<Vec<Rat>> {
        let rr = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !rr.pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![Rat::zero(); self.cols];
                v[f] = Rat::one();
                for (i, &p) in rr.pivots.iter().enumerate() {
                    v[p] = -rr.r.get(i, f).clone();
                }
                v
            })
            .collect()
    }

    /// Null space basis as columns of a matrix (cols x nullity).
    pub fn kernel_matrix(&self) -> RatMatrix {
        Self::from_cols(&self.kernel_rational(), self.cols)
    }

    /// Linearly independent columns (those at pivot positions) spanning the image.
    pub fn image_basis(&self) -> RatMatrix {
        let rr = self.rref();
        self.select_cols(&rr.pivots)
    }

    pub fn inverse(&self) -> Option<RatMatrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let aug = Self::hstack(&[self, &Self::identity(n)], n);
        let rr = aug.rref();
        if rr.pivots.len() < n || rr.pivots[n - 1] != n - 1 {
            return None;
        }
        Some(rr.r.block(0, n, n, n))
    }

    pub fn determinant(&self) -> Rat {
        assert_eq!(self.rows, self.cols);
        let mut m = self.clone();
        let mut det = Rat::one();
        for col in 0..m.cols {
            let Some(p) = (col..m.rows).find(|&i| !m.get(i, col).is_zero()) else {
                return Rat::zero();
            };
            if p != col {
                m.swap_rows(p, col);
                det = -det;
            }
            let piv = m.get(col, col).clone();
            det *= &piv;
            for i in col + 1..m.rows {
                if m.get(i, col).is_zero() {
                    continue;
                }
                let f = m.get(i, col) / &piv;
                for j in col..m.cols {
                    let v = m.get(i, j) - &f * m.get(col, j);
                    m.set(i, j, v);
                }
            }
        }
        det
    }

    /// Some X with self * X = b, if one exists.
    pub fn solve(&self, b: &RatMatrix) -> Option<RatMatrix> {
        assert_eq!(self.rows, b.rows);
        let aug = Self::hstack(&[self, b], self.rows);
        let rr = aug.rref();
        if rr.pivots.iter().any(|&p| p >= self.cols) {
            return None;
        }
        let mut x = Self::zeros(self.cols, b.cols);
        for (i, &p) in rr.pivots.iter().enumerate() {
            for j in 0..b.cols {
                x.set(p, j, rr.r.get(i, self.cols + j).clone());
            }
        }
        Some(x)
    }

    pub fn solve_vec(&self, b: &[Rat]) -> Option<Vec<Rat>> {
        let bm = Self::from_cols(&[b.to_vec()], self.rows);
        self.solve(&bm).map(|x| x.col(0))
    }

    /// A left inverse of a matrix with independent columns, built from an
    /// invertible square selection of its rows.
    pub fn left_inverse(&self) -> RatMatrix {
        let rr = self.transpose().rref();
        assert_eq!(rr.rank, self.cols, "columns are not independent");
        let sub = self.select_rows(&rr.pivots);
        let inv = sub.inverse().expect("pivot rows form an invertible block");
        let mut out = Self::zeros(self.cols, self.rows);
        for (jj, &r) in rr.pivots.iter().enumerate() {
            for i in 0..self.cols {
                out.set(i, r, inv.get(i, jj).clone());
            }
        }
        out
    }

    /// Rows spanning the annihilator of the column space (a matrix whose
    /// kernel is exactly the column space).
    pub fn cokernel_projection(&self) -> RatMatrix {
        let k = self.transpose().kernel_rational();
        Self::from_rows_with_cols(k, self.rows)
    }
}

/// Extends the columns of `base` by columns of `cands` that increase rank;
/// returns the chosen candidate columns.
pub fn complement_columns(base: &RatMatrix, cands: &RatMatrix) -> RatMatrix {
    let rows = base.nrows();
    let mut chosen: Vec<Vec<Rat>> = Vec::new();
    let mut current = base.clone();
    let mut rank = current.rank();
    for j in 0..cands.ncols() {
        let c = cands.col(j);
        let trial = RatMatrix::hstack(
            &[
                &current,
                &RatMatrix::from_cols(std::slice::from_ref(&c), rows),
            ],
            rows,
        );
        let r = trial.rank();
        if r > rank {
            rank = r;
            current = trial;
            chosen.push(c);
        }
    }
    RatMatrix::from_cols(&chosen, rows)
}

/// Integer-cleared pivot-canonical kernel basis.
pub fn kernel_basis(a: &RatMatrix) -> Vec<Vec<BigInt>> {
    a.kernel_rational()
        .iter()
        .map(|v| clear_denominators(v))
        .collect()
}

pub fn rref(a: &RatMatrix) -> Rref {
    a.rref()
}

pub fn int_matrix(rows: &[Vec<i64>]) -> RatMatrix {
    RatMatrix::from_i64(rows)
}

pub fn is_skew_symmetric(b: &[Vec<i64>]) -> bool {
    let n = b.len();
    b.iter().all(|r| r.len() == n) && (0..n).all(|i| (0..n).all(|j| b[i][j] == -b[j][i]))
}
