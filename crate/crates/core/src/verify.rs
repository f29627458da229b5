//! Randomized property suite over small QPs, representations and
//! triangulations.

use std::collections::HashSet;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fixtures;
use crate::laurent::LaurentPoly;
use crate::linalg::{rat, RatMatrix};
use crate::qp::gentle::{bypass_column_identity, find_bypasses};
use crate::qp::{compare_up_to_relabeling, QpComparison, QP};
use crate::rep::{
    cc_function, e_invariant, f_polynomial, g_vector, g_vector_pair, is_isomorphic, mutate_rep,
    triangle_maps, validate_rep, ChiMethod, DecoratedRep,
};
use crate::surface::{
    build_nice_triangulation, corank_check, gentle_qp, MarkedSurface, Triangulation,
};

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PropertyOutcome {
    pub key: char,
    pub name: String,
    pub checked: usize,
    pub skipped: usize,
    pub failures: Vec<String>,
}

impl PropertyOutcome {
    fn new(key: char, name: &str) -> Self {
        PropertyOutcome {
            key,
            name: name.into(),
            checked: 0,
            skipped: 0,
            failures: vec![],
        }
    }

    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failures.push(what());
        }
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SuiteReport {
    pub seed: u64,
    pub representations: usize,
    pub qps: usize,
    pub triangulations: usize,
    pub properties: Vec<PropertyOutcome>,
    pub elapsed_ms: u128,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.properties
            .iter()
            .all(|p| p.failures.is_empty() && p.checked > 0)
    }
}

#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub seed: u64,
    /// Minimum number of representations to generate.
    pub reps: usize,
    pub max_total_dim: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: 2024,
            reps: 200,
            max_total_dim: 6,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Sample {
    pub label: String,
    pub qp_index: usize,
    pub rep: DecoratedRep,
}

/// Moves a representation along an arrow bijection between right-equal QPs.
pub fn transport_along(rep: &DecoratedRep, from: &QP, to: &QP) -> Option<DecoratedRep> {
    let (mapping, negated) = match compare_up_to_relabeling(from, to) {
        QpComparison::Equal { mapping } => (mapping, vec![]),
        QpComparison::EqualAfterSigns { mapping, negated } => (mapping, negated),
        _ => return None,
    };
    let mut out = DecoratedRep::with_dims(to, rep.dims.clone(), rep.decoration.clone());
    for (i, &j) in mapping.iter().enumerate() {
        let m = &rep.mats[i];
        out.mats[j] = if negated.contains(&i) {
            m.scale(&rat(-1))
        } else {
            m.clone()
        };
    }
    Some(out)
}

/// x_k -> N / x_k applied to `f`, multiplied by N^L so that no negative
/// power of N remains. Returns (result, L).
pub fn exchange_substitute(
    f: &LaurentPoly,
    k: usize,
    binomial: &LaurentPoly,
) -> (LaurentPoly, u32) {
    let lo = f.terms().keys().map(|e| e[k]).min().unwrap_or(0);
    let l = (-lo).max(0) as u32;
    let nv = f.nvars();
    let mut out = LaurentPoly::zero(nv);
    for (e, c) in f.terms() {
        let mut mono = e.clone();
        mono[k] = -e[k];
        let power = (e[k] + l as i64) as u32;
        let term = &LaurentPoly::monomial(mono, c.clone()) * &binomial.pow(power);
        out = &out + &term;
    }
    (out, l)
}

fn fits(rep: &DecoratedRep, max_total: usize) -> bool {
    rep.total_dim() <= max_total && rep.dims.iter().all(|&d| d <= 3)
}

fn random_rep(qp: &QP, rng: &mut ChaCha8Rng) -> DecoratedRep {
    let t = qp.total();
    let dims: Vec<usize> = (0..t)
        .map(|v| if v < qp.n() { rng.gen_range(0..=2) } else { 0 })
        .collect();
    let decoration: Vec<usize> = (0..t)
        .map(|v| {
            if v < qp.n() && rng.gen_bool(0.15) {
                1
            } else {
                0
            }
        })
        .collect();
    let mut rep = DecoratedRep::with_dims(qp, dims.clone(), decoration);
    let density = rng.gen_range(0.3..0.9);
    for (i, a) in qp.quiver.arrows.iter().enumerate() {
        let mut m = RatMatrix::zeros(dims[a.target], dims[a.source]);
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                if rng.gen_bool(density) {
                    m.set(r, c, rat(rng.gen_range(-2..=2)));
                }
            }
        }
        rep.mats[i] = m;
    }
    rep
}

fn is_valid(rep: &DecoratedRep, qp: &QP) -> bool {
    validate_rep(rep, qp).map(|r| r.valid).unwrap_or(false)
}

/// Representations from three sources: mutation walks starting at negative
/// simples, random matrices filtered by the relations, and direct sums.
pub fn generate_samples(config: &SuiteConfig) -> (Vec<QP>, Vec<Sample>) {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut qps: Vec<QP> = Vec::new();
    let mut samples: Vec<Sample> = Vec::new();
    let mut seen: HashSet<(usize, DecoratedRep)> = HashSet::new();
    let intern = |qps: &mut Vec<QP>, qp: &QP| -> usize {
        if let Some(i) = qps.iter().position(|q| q == qp) {
            return i;
        }
        qps.push(qp.clone());
        qps.len() - 1
    };
    let zoo = fixtures::qp_zoo();
    let mut push = |samples: &mut Vec<Sample>, label: String, qi: usize, rep: DecoratedRep| {
        if rep.total_dim() > 0 && seen.insert((qi, rep.clone())) {
            samples.push(Sample {
                label,
                qp_index: qi,
                rep,
            });
        }
    };
    let mut round = 0;
    while samples.len() < config.reps && round < 50 {
        round += 1;
        for (name, base) in &zoo {
            let bi = intern(&mut qps, base);
            // Mutation walk from a negative simple.
            let k0 = rng.gen_range(0..base.n());
            let mut qp = base.clone();
            let mut rep = DecoratedRep::negative_simple(base, k0);
            let mut path = vec![k0 + 1];
            for _ in 0..rng.gen_range(1..=4) {
                let k = rng.gen_range(0..qp.n());
                let Ok(m) = mutate_rep(&rep, &qp, k) else {
                    break;
                };
                if m.qp.reduced.truncated || !fits(&m.rep, config.max_total_dim) {
                    break;
                }
                qp = m.qp.qp().clone();
                rep = m.rep;
                path.push(k + 1);
                let qi = intern(&mut qps, &qp);
                push(
                    &mut samples,
                    format!("{name}: walk {path:?}"),
                    qi,
                    rep.clone(),
                );
            }
            // Random matrices satisfying the relations.
            for _ in 0..4 {
                let r = random_rep(base, &mut rng);
                if fits(&r, config.max_total_dim) && is_valid(&r, base) {
                    push(&mut samples, format!("{name}: random"), bi, r);
                }
            }
        }
        // Direct sums of pairs living on the same QP.
        let snapshot = samples.clone();
        for _ in 0..10 {
            let Some(a) = snapshot.choose(&mut rng) else {
                break;
            };
            let mates: Vec<&Sample> = snapshot
                .iter()
                .filter(|s| s.qp_index == a.qp_index)
                .collect();
            let b = mates.choose(&mut rng).unwrap();
            let sum = a.rep.direct_sum(&b.rep, &qps[a.qp_index]);
            if fits(&sum, config.max_total_dim) {
                push(
                    &mut samples,
                    format!("({}) + ({})", a.label, b.label),
                    a.qp_index,
                    sum,
                );
            }
        }
    }
    (qps, samples)
}

/// Triangulations from the nice construction on a list of surfaces, and
/// from random flip sequences starting there.
pub fn generate_triangulations(seed: u64) -> Vec<(String, Triangulation)> {
    let surfaces: Vec<MarkedSurface> = [
        (vec![1, 1], 0),
        (vec![1, 2], 0),
        (vec![1, 3], 0),
        (vec![1, 4], 0),
        (vec![2, 2], 0),
        (vec![3, 4], 0),
        (vec![1, 2], 1),
        (vec![1, 3], 2),
        (vec![2, 4], 2),
        (vec![1, 1, 1], 0),
        (vec![2, 1, 3], 1),
        (vec![1, 2, 1, 2], 0),
        (vec![2, 2, 2, 1], 1),
    ]
    .into_iter()
    .map(|(boundary, punctures)| MarkedSurface {
        genus: 0,
        boundary,
        punctures,
    })
    .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for s in surfaces {
        let Ok(nice) = build_nice_triangulation(&s, None) else {
            continue;
        };
        let mut t = nice.sigma;
        out.push((format!("{:?}+{}", s.boundary, s.punctures), t.clone()));
        for step in 0..6 {
            let k = rng.gen_range(0..t.n());
            if let Ok(f) = t.flip(k) {
                t = f;
                out.push((
                    format!("{:?}+{} flip #{step}", s.boundary, s.punctures),
                    t.clone(),
                ));
            }
        }
    }
    out
}

fn mutable_ks(qp: &QP) -> Vec<usize> {
    (0..qp.n())
        .filter(|&k| !qp.quiver.has_loop_at(k) && !qp.quiver.has_two_cycle_at(k))
        .collect()
}

pub fn run_property_suite(config: &SuiteConfig) -> Result<SuiteReport> {
    let start = Instant::now();
    let (qps, samples) = generate_samples(config);
    let mut props = vec![
        PropertyOutcome::new('a', "mutation is an involution up to isomorphism"),
        PropertyOutcome::new('b', "E-invariant is mutation invariant"),
        PropertyOutcome::new('c', "CC function is mutation invariant"),
        PropertyOutcome::new('d', "restricted g-vector is a prefix of the extended one"),
        PropertyOutcome::new('e', "CC function is multiplicative on direct sums"),
        PropertyOutcome::new('f', "alpha gamma = 0 and gamma beta = 0"),
        PropertyOutcome::new('g', "flips agree with matrix mutation"),
        PropertyOutcome::new('h', "bypass column identity"),
        PropertyOutcome::new('i', "corank formula"),
        PropertyOutcome::new(
            'j',
            "fixed-point and point-count Euler characteristics agree",
        ),
    ];
    let mut g_routes = PropertyOutcome::new('k', "both g-vector routes agree");
    let method = ChiMethod::Auto;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x5eed);
    let mut cc_cache: Vec<Option<LaurentPoly>> = vec![None; samples.len()];
    for (si, s) in samples.iter().enumerate() {
        let qp = &qps[s.qp_index];
        let tag = |what: &str| format!("{what} on {} (dims {:?})", s.label, s.rep.dims);
        // (f)
        for k in mutable_ks(qp) {
            let t = triangle_maps(&s.rep, qp, k);
            let ag = t.alpha.mul(&t.gamma).is_zero();
            let gb = t.gamma.mul(&t.beta).is_zero();
            props[5].record(ag && gb, || tag(&format!("vertex {}", k + 1)));
        }
        // (d) and the second g-vector route.
        let g = g_vector(&s.rep, qp);
        let restricted = qp.restrict();
        match s.rep.transport(qp, &restricted) {
            Ok(r) => {
                let gr = g_vector(&r, &restricted);
                props[3].record(gr[..] == g[..qp.n()], || tag(&format!("{gr:?} vs {g:?}")));
            }
            Err(_) => props[3].skipped += 1,
        }
        match g_vector_pair(&s.rep, qp) {
            Ok(p) => g_routes.record(p.agree, || {
                tag(&format!("{:?} vs {:?}", p.kernel_route, p.resolution_route))
            }),
            Err(_) => g_routes.skipped += 1,
        }
        // (j)
        if crate::rep::chi::fixedpoint_counts(&s.rep, qp).is_ok() {
            let a = f_polynomial(&s.rep, qp, ChiMethod::Fixedpoint);
            let b = f_polynomial(&s.rep, qp, ChiMethod::Pointcount);
            match (a, b) {
                (Ok(a), Ok(b)) => props[9].record(a == b, || tag(&format!("{a} vs {b}"))),
                (_, Err(Error::TooLarge(_))) => props[9].skipped += 1,
                (a, b) => props[9].record(false, || tag(&format!("{a:?} / {b:?}"))),
            }
        } else {
            props[9].skipped += 1;
        }
        let cc = match cc_function(&s.rep, qp, method) {
            Ok(c) => Some(c),
            Err(Error::TooLarge(_)) => None,
            Err(e) => {
                props[2].record(false, || tag(&format!("cc failed: {e}")));
                None
            }
        };
        cc_cache[si] = cc.clone();
        // (e) against a random earlier sample on the same QP.
        let mates: Vec<usize> = (0..si)
            .filter(|&j| samples[j].qp_index == s.qp_index && cc_cache[j].is_some())
            .filter(|&j| fits(&s.rep.direct_sum(&samples[j].rep, qp), config.max_total_dim))
            .collect();
        // Falls back to a simple or negative simple partner.
        let partner = match mates.choose(&mut rng) {
            Some(&j) => Some((
                samples[j].rep.clone(),
                samples[j].label.clone(),
                cc_cache[j].clone(),
            )),
            None => {
                let k = rng.gen_range(0..qp.n());
                let p = if rng.gen_bool(0.5) {
                    DecoratedRep::simple(qp, k)
                } else {
                    DecoratedRep::negative_simple(qp, k)
                };
                let label = format!("dims {:?}, decoration {:?}", p.dims, p.decoration);
                let c = cc_function(&p, qp, method).ok();
                Some((p, label, c))
                    .filter(|(p, _, _)| fits(&s.rep.direct_sum(p, qp), config.max_total_dim))
            }
        };
        match (&cc, partner) {
            (Some(cc), Some((other, label, Some(cc_other)))) => {
                let sum = s.rep.direct_sum(&other, qp);
                match cc_function(&sum, qp, method) {
                    Ok(cs) => {
                        let prod = cc * &cc_other;
                        props[4].record(cs == prod, || tag(&format!("with {label}")));
                    }
                    Err(Error::TooLarge(_)) => props[4].skipped += 1,
                    Err(e) => props[4].record(false, || tag(&format!("{e}"))),
                }
            }
            _ => props[4].skipped += 1,
        }
        // (a), (b), (c) at every admissible vertex.
        let e0 = e_invariant(&s.rep, qp);
        let bt = qp.quiver.b_matrix();
        for k in mutable_ks(qp) {
            let once = match mutate_rep(&s.rep, qp, k) {
                Ok(m) => m,
                Err(e) => {
                    props[0].record(false, || tag(&format!("mutation at {} failed: {e}", k + 1)));
                    continue;
                }
            };
            let q1 = once.qp.qp();
            if !is_valid(&once.rep, q1) {
                props[0].record(false, || {
                    tag(&format!("mutation at {} is not a representation", k + 1))
                });
                continue;
            }
            props[1].record(e_invariant(&once.rep, q1) == e0, || {
                tag(&format!("vertex {}", k + 1))
            });
            match mutate_rep(&once.rep, q1, k) {
                Ok(twice) => match transport_along(&twice.rep, twice.qp.qp(), qp) {
                    Some(back) => {
                        let iso = is_isomorphic(&back, &s.rep, qp);
                        props[0].record(iso.holds(), || tag(&format!("vertex {}: {iso:?}", k + 1)));
                    }
                    None => props[0].skipped += 1,
                },
                Err(e) => props[0].record(false, || {
                    tag(&format!("second mutation at {} failed: {e}", k + 1))
                }),
            }
            // (c): requires the mutated quiver to carry the mutated matrix.
            let Some(cc) = &cc else {
                props[2].skipped += 1;
                continue;
            };
            let Ok(bt1) = bt.mutate(k) else { continue };
            if q1.quiver.b_matrix() != bt1 {
                props[2].skipped += 1;
                continue;
            }
            match cc_function(&once.rep, q1, method) {
                Ok(cc1) => {
                    let binomial = bt.exchange_binomial(k)?;
                    let (lhs, l) = exchange_substitute(&cc1, k, &binomial);
                    let rhs = cc * &binomial.pow(l);
                    props[2].record(lhs == rhs, || {
                        tag(&format!("vertex {}: {cc1} vs {cc}", k + 1))
                    });
                }
                Err(Error::TooLarge(_)) => props[2].skipped += 1,
                Err(e) => props[2].record(false, || tag(&format!("{e}"))),
            }
        }
    }
    // Surfaces: (g), (h), (i).
    let tris = generate_triangulations(config.seed);
    for (label, t) in &tris {
        match corank_check(t) {
            Ok(_) => props[8].record(true, String::new),
            Err(e) => props[8].record(false, || format!("{label}: {e}")),
        }
        let b = t.exchange_matrix();
        for k in 0..t.n() {
            match t.flip(k) {
                Ok(f) => {
                    let ok = b
                        .mutate(k)
                        .map(|m| m == f.exchange_matrix())
                        .unwrap_or(false);
                    props[6].record(ok, || format!("{label}: arc {}", t.arcs[k]));
                }
                Err(Error::NotFlippable(_)) => props[6].skipped += 1,
                Err(e) => props[6].record(false, || format!("{label}: arc {}: {e}", t.arcs[k])),
            }
        }
        if t.surface.punctures == 0 {
            match gentle_qp(t, crate::qp::DEFAULT_TRUNCATION) {
                Ok(qp) => match find_bypasses(&qp) {
                    Ok(found) => {
                        for pi in &found {
                            let ok = bypass_column_identity(&qp, pi).is_ok();
                            props[7].record(ok, || format!("{label}: {}", qp.path_label(&pi.path)));
                        }
                    }
                    Err(e) => props[7].record(false, || format!("{label}: {e}")),
                },
                Err(_) => props[7].skipped += 1,
            }
        }
    }
    props.push(g_routes);
    Ok(SuiteReport {
        seed: config.seed,
        representations: samples.len(),
        qps: samples
            .iter()
            .map(|s| s.qp_index)
            .collect::<HashSet<_>>()
            .len(),
        triangulations: tris.len(),
        properties: props,
        elapsed_ms: start.elapsed().as_millis(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exchange_substitution_on_a_variable() {
        // x1' = (x2 + x3) / x1: substituting into x1' gives back the binomial.
        let b = LaurentPoly::parse(3, "x2 + x3").unwrap();
        let (out, l) = exchange_substitute(&LaurentPoly::var(3, 0), 0, &b);
        assert_eq!(l, 0);
        assert_eq!(out, LaurentPoly::parse(3, "x1^-1 x2 + x1^-1 x3").unwrap());
        let (out, l) = exchange_substitute(&LaurentPoly::parse(3, "x1^-1").unwrap(), 0, &b);
        assert_eq!(l, 1);
        assert_eq!(out, LaurentPoly::var(3, 0));
    }

    #[test]
    fn small_suite_passes() {
        let report = run_property_suite(&SuiteConfig {
            seed: 7,
            reps: 30,
            max_total_dim: 4,
        })
        .unwrap();
        for p in &report.properties {
            assert!(
                p.failures.is_empty(),
                "({}) {}: {:?}",
                p.key,
                p.name,
                &p.failures[..p.failures.len().min(3)]
            );
        }
    }
}
