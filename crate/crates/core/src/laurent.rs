//! Multivariate Laurent polynomials over Q and monomial substitutions.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{fmt_rat, parse_rat, rat, Rat};

/// Exponent vector to nonzero coefficient, in lexicographic order.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    nvars: usize,
    terms: BTreeMap<Vec<i64>, Rat>,
}

impl LaurentPoly {
    pub fn zero(nvars: usize) -> Self {
        LaurentPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Rat::one())
    }

    pub fn constant(nvars: usize, c: Rat) -> Self {
        Self::monomial(vec![0; nvars], c)
    }

    pub fn monomial(exps: Vec<i64>, c: Rat) -> Self {
        let mut p = Self::zero(exps.len());
        p.add_term(exps, c);
        p
    }

    /// The variable x_{i+1}.
    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::monomial(e, Rat::one())
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Vec<i64>, Rat)>) -> Self {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            assert_eq!(e.len(), nvars, "exponent vector length");
            p.add_term(e, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &BTreeMap<Vec<i64>, Rat> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, exps: &[i64]) -> Rat {
        self.terms.get(exps).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn add_term(&mut self, exps: Vec<i64>, c: Rat) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exps) {
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
            Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(Error::ShapeMismatch(format!(
                "Laurent polynomials in {} and {} variables",
                self.nvars, other.nvars
            )));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut acc: BTreeMap<Vec<i64>, Rat> = BTreeMap::new();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Vec<i64> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                *acc.entry(e).or_insert_with(Rat::zero) += c1 * c2;
            }
        }
        acc.retain(|_, v| !v.is_zero());
        Ok(LaurentPoly {
            nvars: self.nvars,
            terms: acc,
        })
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        LaurentPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, x)| (e.clone(), x * c)).collect(),
        }
    }

    /// Multiplies by the monomial x^e.
    pub fn shift(&self, e: &[i64]) -> Self {
        assert_eq!(e.len(), self.nvars);
        LaurentPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(f, c)| (f.iter().zip(e).map(|(a, b)| a + b).collect(), c.clone()))
                .collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::one(self.nvars);
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    /// The single term `c x^e` if the polynomial is a monomial.
    pub fn as_monomial(&self) -> Option<(&Vec<i64>, &Rat)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    pub fn leading_term(&self) -> Option<(&Vec<i64>, &Rat)> {
        self.terms.iter().next_back()
    }

    /// Entrywise minimum and maximum exponents over the support.
    pub fn exponent_box(&self) -> Option<(Vec<i64>, Vec<i64>)> {
        let mut it = self.terms.keys();
        let first = it.next()?;
        let mut lo = first.clone();
        let mut hi = first.clone();
        for e in it {
            for i in 0..self.nvars {
                lo[i] = lo[i].min(e[i]);
                hi[i] = hi[i].max(e[i]);
            }
        }
        Some((lo, hi))
    }

    pub fn is_polynomial(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&x| x >= 0))
    }

    pub fn has_integer_coefficients(&self) -> bool {
        self.terms.values().all(|c| c.is_integer())
    }

    /// The quotient `self / g` if it is a Laurent polynomial.
    pub fn exact_div(&self, g: &Self) -> Option<Self> {
        assert_eq!(self.nvars, g.nvars);
        if g.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Self::zero(self.nvars));
        }
        if let Some((e, c)) = g.as_monomial() {
            let neg: Vec<i64> = e.iter().map(|x| -x).collect();
            return Some(self.shift(&neg).scale(&c.recip()));
        }
        // Newton polytopes add under multiplication, which bounds the quotient.
        let (flo, fhi) = self.exponent_box()?;
        let (glo, ghi) = g.exponent_box()?;
        let (ge, gc) = g.leading_term()?;
        let mut r = self.clone();
        let mut q = Self::zero(self.nvars);
        while let Some((re, rc)) = r.leading_term() {
            let e: Vec<i64> = re.iter().zip(ge).map(|(a, b)| a - b).collect();
            let inside =
                (0..self.nvars).all(|i| e[i] >= flo[i] - glo[i] && e[i] <= fhi[i] - ghi[i]);
            if !inside {
                return None;
            }
            let c = rc / gc;
            let step = g.shift(&e).scale(&c);
            q.add_term(e, c);
            r = &r - &step;
        }
        Some(q)
    }

    /// Appends `extra` variables with exponent zero.
    pub fn extend_vars(&self, extra: usize) -> Self {
        LaurentPoly {
            nvars: self.nvars + extra,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    let mut e = e.clone();
                    e.extend(std::iter::repeat_n(0, extra));
                    (e, c.clone())
                })
                .collect(),
        }
    }

    pub fn substitute(&self, sigma: &MonomialAssignment) -> Result<Self> {
        if sigma.images.len() < self.nvars {
            return Err(Error::IncompleteAssignment(sigma.images.len()));
        }
        let mut out = Self::zero(sigma.target_nvars);
        for (e, c) in &self.terms {
            let mut exps = vec![0i64; sigma.target_nvars];
            let mut coeff = c.clone();
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let (img, s) = &sigma.images[i];
                for (x, y) in exps.iter_mut().zip(img) {
                    *x += k * y;
                }
                if !s.is_one() {
                    let p = num_traits::pow(s.clone(), k.unsigned_abs() as usize);
                    coeff *= if k < 0 { p.recip() } else { p };
                }
            }
            out.add_term(exps, coeff);
        }
        Ok(out)
    }

    pub fn to_text(&self) -> String {
        self.to_string()
    }

    /// Parses the text form produced by `to_text`.
    pub fn parse(nvars: usize, s: &str) -> Result<Self> {
        let s = s.trim();
        let mut p = Self::zero(nvars);
        if s.is_empty() || s == "0" {
            return Ok(p);
        }
        for term in s.split('+') {
            let term = term.trim();
            let bad = || Error::Parse(format!("bad term {term:?}"));
            let (coeff, mono) = match term.split_once('*') {
                Some((c, m)) => (parse_rat(c)?, m.trim()),
                None if term.starts_with('x') => (Rat::one(), term),
                None if term.starts_with("-x") => (rat(-1), &term[1..]),
                None => (parse_rat(term)?, ""),
            };
            let mut e = vec![0i64; nvars];
            for factor in mono.split_whitespace() {
                let f = factor.strip_prefix('x').ok_or_else(bad)?;
                let (idx, pw) = match f.split_once('^') {
                    Some((i, p)) => (i, p.parse::<i64>().map_err(|_| bad())?),
                    None => (f, 1),
                };
                let idx: usize = idx.parse().map_err(|_| bad())?;
                if idx == 0 || idx > nvars {
                    return Err(Error::Parse(format!("variable x{idx} out of range")));
                }
                e[idx - 1] += pw;
            }
            p.add_term(e, coeff);
        }
        Ok(p)
    }

    pub fn to_json(&self) -> LaurentJson {
        LaurentJson {
            num_vars: Some(self.nvars),
            terms: self
                .terms
                .iter()
                .map(|(e, c)| TermJson {
                    coeff: fmt_rat(c),
                    exps: e.clone(),
                })
                .collect(),
        }
    }

    pub fn from_json(j: &LaurentJson) -> Result<Self> {
        let nvars = match (j.num_vars, j.terms.first()) {
            (Some(n), _) => n,
            (None, Some(t)) => t.exps.len(),
            (None, None) => return Err(Error::Parse("empty polynomial needs numVars".into())),
        };
        let mut p = Self::zero(nvars);
        for t in &j.terms {
            if t.exps.len() != nvars {
                return Err(Error::ShapeMismatch("exponent vector length".into()));
            }
            p.add_term(t.exps.clone(), parse_rat(&t.coeff)?);
        }
        Ok(p)
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{}", fmt_rat(c))?;
            let vars: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k != 0)
                .map(|(i, &k)| {
                    if k == 1 {
                        format!("x{}", i + 1)
                    } else {
                        format!("x{}^{}", i + 1, k)
                    }
                })
                .collect();
            if !vars.is_empty() {
                write!(f, " * {}", vars.join(" "))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentPoly[{}]({})", self.nvars, self)
    }
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.try_add(rhs).expect("variable count mismatch")
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.try_add(&-rhs).expect("variable count mismatch")
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.try_mul(rhs).expect("variable count mismatch")
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        self.scale(&rat(-1))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub coeff: String,
    pub exps: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LaurentJson {
    #[serde(rename = "numVars", default, skip_serializing_if = "Option::is_none")]
    pub num_vars: Option<usize>,
    pub terms: Vec<TermJson>,
}

/// A monomial ring map: variable i goes to `scalar_i * x^{image_i}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialAssignment {
    pub target_nvars: usize,
    pub images: Vec<(Vec<i64>, Rat)>,
}

impl MonomialAssignment {
    pub fn identity(n: usize) -> Self {
        Self::from_exponents(n, (0..n).map(|i| unit(n, i)).collect())
    }

    pub fn from_exponents(target_nvars: usize, images: Vec<Vec<i64>>) -> Self {
        assert!(images.iter().all(|e| e.len() == target_nvars));
        MonomialAssignment {
            target_nvars,
            images: images.into_iter().map(|e| (e, Rat::one())).collect(),
        }
    }

    /// y_j -> prod_i x_i^{b_ij}, the coefficient-twisted variables of a
    /// rectangular exchange matrix given by rows.
    pub fn y_hat(rows: &[Vec<i64>]) -> Self {
        let total = rows.len();
        let n = rows.first().map_or(0, |r| r.len());
        Self::from_exponents(
            total,
            (0..n)
                .map(|j| rows.iter().map(|r| r[j]).collect())
                .collect(),
        )
    }
}

pub fn unit(n: usize, i: usize) -> Vec<i64> {
    let mut e = vec![0; n];
    e[i] = 1;
    e
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(n: usize, s: &str) -> LaurentPoly {
        LaurentPoly::parse(n, s).unwrap()
    }

    #[test]
    fn arithmetic_examples() {
        let f = p(2, "1 + 1 * x1");
        assert_eq!(&f + &LaurentPoly::zero(2), f);
        let g = p(2, "1 + x2");
        assert_eq!(&f * &g, p(2, "1 + x1 + x2 + x1 x2"));
        let lhs = p(4, "x2^-1 x3 x4");
        let rhs = p(4, "1 + x1 x3^-1 x4^-1");
        assert_eq!(&lhs * &rhs, p(4, "x2^-1 x3 x4 + x1 x2^-1"));
        assert!(LaurentPoly::zero(2).try_add(&LaurentPoly::zero(3)).is_err());
    }

    #[test]
    fn text_round_trip() {
        let f = p(3, "-1/2 * x1^-1 x3^2 + 3 + x2");
        assert_eq!(f.to_string(), "-1/2 * x1^-1 x3^2 + 3 + 1 * x2");
        assert_eq!(LaurentPoly::parse(3, &f.to_string()).unwrap(), f);
        assert_eq!(LaurentPoly::zero(2).to_string(), "0");
        assert_eq!(p(2, "-x1"), LaurentPoly::var(2, 0).scale(&rat(-1)));
        assert!(LaurentPoly::parse(2, "x3").is_err());
    }

    #[test]
    fn json_round_trip() {
        let f = p(3, "2/3 * x1 x2^-1 + 5");
        let j = serde_json::to_string(&f.to_json()).unwrap();
        let back: LaurentJson = serde_json::from_str(&j).unwrap();
        assert_eq!(LaurentPoly::from_json(&back).unwrap(), f);
    }

    #[test]
    fn y_hat_substitution() {
        let sigma = MonomialAssignment::y_hat(&[vec![0, 1], vec![-1, 0], vec![1, -1]]);
        let f = p(2, "1 + x1 + x1 x2");
        assert_eq!(
            f.substitute(&sigma).unwrap(),
            p(3, "1 + x2^-1 x3 + x1 x2^-1")
        );
        let id = MonomialAssignment::identity(2);
        assert_eq!(f.substitute(&id).unwrap(), f);
        let short = MonomialAssignment::from_exponents(2, vec![vec![1, 0]]);
        assert_eq!(
            f.substitute(&short).unwrap_err(),
            Error::IncompleteAssignment(1)
        );
    }

    #[test]
    fn exact_division() {
        let f = p(2, "x1^2 + -1 * x2^2");
        let g = p(2, "x1 + x2");
        assert_eq!(f.exact_div(&g).unwrap(), p(2, "x1 + -1 * x2"));
        assert!(p(2, "1").exact_div(&g).is_none());
        assert_eq!(
            p(2, "x1 + x2").exact_div(&p(2, "x1^-1")).unwrap(),
            p(2, "x1^2 + x1 x2")
        );
        let h = p(3, "x1^-1 + x2 x3^-2");
        let prod = &h * &g.extend_vars(1);
        assert_eq!(prod.exact_div(&h).unwrap(), g.extend_vars(1));
    }

    fn poly(n: usize) -> impl Strategy<Value = LaurentPoly> {
        prop::collection::vec((prop::collection::vec(-2i64..=2, n), -3i64..=3), 0..5).prop_map(
            move |ts| LaurentPoly::from_terms(n, ts.into_iter().map(|(e, c)| (e, rat(c)))),
        )
    }

    fn assignment() -> impl Strategy<Value = MonomialAssignment> {
        prop::collection::vec(prop::collection::vec(-2i64..=2, 2), 3)
            .prop_map(|imgs| MonomialAssignment::from_exponents(2, imgs))
    }

    proptest! {
        #[test]
        fn ring_axioms(f in poly(3), g in poly(3), h in poly(3)) {
            prop_assert_eq!(&(&f * &g) * &h, &f * &(&g * &h));
            prop_assert_eq!(&f * &(&g + &h), &(&f * &g) + &(&f * &h));
            prop_assert_eq!(&f + &g, &g + &f);
            prop_assert!((&f - &f).is_zero());
        }

        #[test]
        fn substitution_is_a_homomorphism(f in poly(3), g in poly(3), s in assignment()) {
            let fs = f.substitute(&s).unwrap();
            let gs = g.substitute(&s).unwrap();
            prop_assert_eq!((&f * &g).substitute(&s).unwrap(), &fs * &gs);
            prop_assert_eq!((&f + &g).substitute(&s).unwrap(), &fs + &gs);
        }

        #[test]
        fn unimodular_change_round_trip(f in poly(2), a in -2i64..=2) {
            // x1 -> x1 x2^a, x2 -> x2 and its inverse.
            let fwd = MonomialAssignment::from_exponents(2, vec![vec![1, a], vec![0, 1]]);
            let inv = MonomialAssignment::from_exponents(2, vec![vec![1, -a], vec![0, 1]]);
            prop_assert_eq!(f.substitute(&fwd).unwrap().substitute(&inv).unwrap(), f);
        }

        #[test]
        fn division_recovers_factor(f in poly(2), g in poly(2)) {
            prop_assume!(!g.is_zero());
            let prod = &f * &g;
            prop_assert_eq!(prod.exact_div(&g).unwrap(), f);
        }
    }
}
