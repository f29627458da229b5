//! Ideal triangulations of marked surfaces as triangle lists.
//!
//! Triangles list their sides clockwise. Within a triangle, side `y`
//! immediately following side `x` contributes `+1` to `b[x][y]`. A
//! self-folded triangle is written `[loop, radius, radius]`; the radius is
//! replaced by its loop before counting.

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::cone::{kernel_cone_trivial, lp_feasible, KernelConeReport};
use crate::error::{Error, Result};
use crate::linalg::{fmt_rat, Rat, RatMatrix};
use crate::qp::{Arrow, Potential, Quiver, QP};
use crate::seed::ExchangeMatrix;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarkedSurface {
    pub genus: usize,
    /// Marked points on each boundary component.
    pub boundary: Vec<usize>,
    pub punctures: usize,
}

impl MarkedSurface {
    pub fn marked_on_boundary(&self) -> usize {
        self.boundary.iter().sum()
    }

    /// Number of arcs in any ideal triangulation.
    pub fn arc_count(&self) -> Result<usize> {
        let n = 6 * self.genus as i64
            + 3 * self.boundary.len() as i64
            + 3 * self.punctures as i64
            + self.marked_on_boundary() as i64
            - 6;
        if self.boundary.contains(&0) || n < 1 {
            return Err(Error::InvalidTriangulation(format!(
                "surface {self:?} has no triangulation with arcs"
            )));
        }
        Ok(n as usize)
    }

    pub fn even_components(&self) -> usize {
        self.boundary.iter().filter(|&&c| c % 2 == 0).count()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Edge {
    Arc(usize),
    Boundary(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Triangulation {
    pub surface: MarkedSurface,
    pub arcs: Vec<String>,
    pub boundary: Vec<String>,
    pub triangles: Vec<[Edge; 3]>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TriangleJson {
    pub edges: [String; 3],
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelfFoldedJson {
    #[serde(rename = "loop")]
    pub loop_arc: String,
    pub radius: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TriangulationJson {
    pub genus: usize,
    pub boundary: Vec<usize>,
    #[serde(default)]
    pub punctures: usize,
    pub arcs: Vec<String>,
    pub boundary_edges: Vec<String>,
    pub triangles: Vec<TriangleJson>,
    #[serde(default)]
    pub self_folded: Vec<SelfFoldedJson>,
}

fn rotate(t: [Edge; 3], first: usize) -> [Edge; 3] {
    [t[first], t[(first + 1) % 3], t[(first + 2) % 3]]
}

impl Triangulation {
    pub fn new(
        surface: MarkedSurface,
        arcs: Vec<String>,
        boundary: Vec<String>,
        triangles: Vec<[Edge; 3]>,
    ) -> Result<Self> {
        let t = Triangulation {
            surface,
            arcs,
            boundary,
            triangles,
        };
        t.validate()?;
        Ok(t)
    }

    pub fn n(&self) -> usize {
        self.arcs.len()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidTriangulation(m));
        let mut seen = HashMap::new();
        for l in self.arcs.iter().chain(&self.boundary) {
            if seen.insert(l.as_str(), ()).is_some() {
                return bad(format!("label {l} used twice"));
            }
        }
        let mut arc_slots = vec![0usize; self.n()];
        let mut bd_slots = vec![0usize; self.boundary.len()];
        for t in &self.triangles {
            for e in t {
                match *e {
                    Edge::Arc(i) if i < self.n() => arc_slots[i] += 1,
                    Edge::Boundary(i) if i < self.boundary.len() => bd_slots[i] += 1,
                    _ => return bad("edge index out of range".into()),
                }
            }
            if t[0] == t[1] && t[1] == t[2] {
                return bad("degenerate triangle".into());
            }
            if let Some((l, r)) = self_folded_parts(t) {
                if !matches!(r, Edge::Arc(_)) || !matches!(l, Edge::Arc(_)) {
                    return bad("self-folded triangles must consist of arcs".into());
                }
            }
        }
        if let Some(i) = arc_slots.iter().position(|&c| c != 2) {
            return bad(format!(
                "arc {} lies in {} triangle slots",
                self.arcs[i], arc_slots[i]
            ));
        }
        if let Some(i) = bd_slots.iter().position(|&c| c != 1) {
            return bad(format!(
                "boundary edge {} lies in {} triangle slots",
                self.boundary[i], bd_slots[i]
            ));
        }
        let expected = self.surface.arc_count()?;
        if expected != self.n() {
            return bad(format!("surface needs {expected} arcs, found {}", self.n()));
        }
        if self.surface.marked_on_boundary() != self.boundary.len() {
            return bad("boundary edge count differs from boundary marked points".into());
        }
        Ok(())
    }

    pub fn label(&self, e: Edge) -> &str {
        match e {
            Edge::Arc(i) => &self.arcs[i],
            Edge::Boundary(i) => &self.boundary[i],
        }
    }

    pub fn arc_index(&self, label: &str) -> Option<usize> {
        self.arcs.iter().position(|a| a == label)
    }

    /// Maps each radius to its enclosing loop.
    pub fn radius_loops(&self) -> BTreeMap<usize, usize> {
        let mut out = BTreeMap::new();
        for t in &self.triangles {
            if let Some((Edge::Arc(l), Edge::Arc(r))) = self_folded_parts(t) {
                out.insert(r, l);
            }
        }
        out
    }

    pub fn b_matrix(&self) -> Vec<Vec<i64>> {
        let n = self.n();
        let mut c = vec![vec![0i64; n]; n];
        for t in &self.triangles {
            if self_folded_parts(t).is_some() {
                continue;
            }
            for k in 0..3 {
                if let (Edge::Arc(x), Edge::Arc(y)) = (t[k], t[(k + 1) % 3]) {
                    c[x][y] += 1;
                    c[y][x] -= 1;
                }
            }
        }
        let loops = self.radius_loops();
        let pi = |i: usize| *loops.get(&i).unwrap_or(&i);
        (0..n)
            .map(|i| (0..n).map(|j| c[pi(i)][pi(j)]).collect())
            .collect()
    }

    pub fn exchange_matrix(&self) -> ExchangeMatrix {
        ExchangeMatrix::square(self.b_matrix()).expect("triangulation matrices are skew-symmetric")
    }

    /// Replaces `arc` by the other diagonal of the quadrilateral formed by
    /// its two triangles; the new arc keeps the index and gets `new_label`.
    pub fn flip_as(&self, arc: usize, new_label: &str) -> Result<Self> {
        if arc >= self.n() {
            return Err(Error::NotFlippable(format!(
                "no arc with index {}",
                arc + 1
            )));
        }
        if self.radius_loops().contains_key(&arc) {
            return Err(Error::NotFlippable(format!(
                "{} is the folded side of a self-folded triangle",
                self.arcs[arc]
            )));
        }
        let e = Edge::Arc(arc);
        let holders: Vec<usize> = (0..self.triangles.len())
            .filter(|&i| self.triangles[i].contains(&e))
            .collect();
        if holders.len() != 2 {
            return Err(Error::NotFlippable(format!(
                "{} borders a single triangle twice",
                self.arcs[arc]
            )));
        }
        let place = |ti: usize| {
            let t = self.triangles[ti];
            rotate(t, t.iter().position(|&x| x == e).unwrap())
        };
        let [_, a, b] = place(holders[0]);
        let [_, c, d] = place(holders[1]);
        let mut triangles: Vec<[Edge; 3]> = self
            .triangles
            .iter()
            .enumerate()
            .filter(|(i, _)| !holders.contains(i))
            .map(|(_, t)| *t)
            .collect();
        triangles.push([e, b, c]);
        triangles.push([e, d, a]);
        let mut arcs = self.arcs.clone();
        arcs[arc] = new_label.to_string();
        Triangulation::new(self.surface.clone(), arcs, self.boundary.clone(), triangles)
    }

    pub fn flip(&self, arc: usize) -> Result<Self> {
        let label = format!("{}'", self.arcs[arc.min(self.n().saturating_sub(1))]);
        self.flip_as(arc, &label)
    }

    pub fn to_json(&self) -> TriangulationJson {
        let loops = self.radius_loops();
        TriangulationJson {
            genus: self.surface.genus,
            boundary: self.surface.boundary.clone(),
            punctures: self.surface.punctures,
            arcs: self.arcs.clone(),
            boundary_edges: self.boundary.clone(),
            triangles: self
                .triangles
                .iter()
                .map(|t| TriangleJson {
                    edges: t.map(|e| self.label(e).to_string()),
                })
                .collect(),
            self_folded: loops
                .iter()
                .map(|(&r, &l)| SelfFoldedJson {
                    loop_arc: self.arcs[l].clone(),
                    radius: self.arcs[r].clone(),
                })
                .collect(),
        }
    }

    pub fn from_json(j: &TriangulationJson) -> Result<Self> {
        let surface = MarkedSurface {
            genus: j.genus,
            boundary: j.boundary.clone(),
            punctures: j.punctures,
        };
        let mut index = HashMap::new();
        for (i, a) in j.arcs.iter().enumerate() {
            index.insert(a.as_str(), Edge::Arc(i));
        }
        for (i, b) in j.boundary_edges.iter().enumerate() {
            index.insert(b.as_str(), Edge::Boundary(i));
        }
        let triangles = j
            .triangles
            .iter()
            .map(|t| {
                let mut out = [Edge::Arc(0); 3];
                for (k, l) in t.edges.iter().enumerate() {
                    out[k] = *index
                        .get(l.as_str())
                        .ok_or_else(|| Error::InvalidTriangulation(format!("unknown edge {l}")))?;
                }
                Ok(out)
            })
            .collect::<Result<Vec<_>>>()?;
        let tri = Triangulation::new(surface, j.arcs.clone(), j.boundary_edges.clone(), triangles)?;
        let loops = tri.radius_loops();
        for sf in &j.self_folded {
            let (l, r) = (tri.arc_index(&sf.loop_arc), tri.arc_index(&sf.radius));
            match (l, r) {
                (Some(l), Some(r)) if loops.get(&r) == Some(&l) => {}
                _ => {
                    return Err(Error::InvalidTriangulation(format!(
                        "{}/{} is not a self-folded triangle",
                        sf.loop_arc, sf.radius
                    )))
                }
            }
        }
        Ok(tri)
    }

    fn triangle_with(&self, e: Edge) -> Option<usize> {
        self.triangles.iter().position(|t| t.contains(&e))
    }
}

fn self_folded_parts(t: &[Edge; 3]) -> Option<(Edge, Edge)> {
    for k in 0..3 {
        let (x, y, z) = (t[k], t[(k + 1) % 3], t[(k + 2) % 3]);
        if y == z && x != y {
            return Some((x, y));
        }
    }
    None
}

/// The annulus with one marked point per boundary component.
pub fn annulus_base() -> Triangulation {
    let s = MarkedSurface {
        genus: 0,
        boundary: vec![1, 1],
        punctures: 0,
    };
    Triangulation::new(
        s,
        vec!["a1".into(), "a2".into()],
        vec!["b1".into(), "b2".into()],
        vec![
            [Edge::Boundary(0), Edge::Arc(0), Edge::Arc(1)],
            [Edge::Boundary(1), Edge::Arc(0), Edge::Arc(1)],
        ],
    )
    .expect("annulus template is valid")
}

/// Genus zero with `b` boundary components and one marked point on each:
/// an annulus around every inner hole, cut off from the outer disc by a
/// loop at the outer marked point, with the outer polygon fanned by loops.
pub fn genus_zero_base(b: usize) -> Result<Triangulation> {
    match b {
        0 | 1 => return Err(Error::BaseTriangulationRequired),
        2 => return Ok(annulus_base()),
        _ => {}
    }
    let holes = b - 1;
    let mut arcs: Vec<String> = Vec::new();
    let boundary: Vec<String> = (1..=b).map(|k| format!("b{k}")).collect();
    let mut triangles = Vec::new();
    let mut loops = Vec::new();
    for h in 0..holes {
        let x = arcs.len();
        arcs.push(format!("a{}", 2 * h + 1));
        arcs.push(format!("a{}", 2 * h + 2));
        let l = arcs.len();
        arcs.push(format!("l{}", h + 1));
        loops.push(Edge::Arc(l));
        // The hole boundary is component h + 2; the outer one is component 1.
        triangles.push([Edge::Boundary(h + 1), Edge::Arc(x), Edge::Arc(x + 1)]);
        triangles.push([Edge::Arc(l), Edge::Arc(x), Edge::Arc(x + 1)]);
    }
    // Outer polygon: sides b1, l1, ..., l_holes, fanned from its first corner.
    let mut sides = vec![Edge::Boundary(0)];
    sides.extend(loops.iter().copied());
    let mut prev = sides[1];
    for k in 2..sides.len() - 1 {
        let d = arcs.len();
        arcs.push(format!("d{}", k - 1));
        triangles.push([prev, sides[k], Edge::Arc(d)]);
        prev = Edge::Arc(d);
    }
    triangles.push([sides[0], prev, sides[sides.len() - 1]]);
    let s = MarkedSurface {
        genus: 0,
        boundary: vec![1; b],
        punctures: 0,
    };
    Triangulation::new(s, arcs, boundary, triangles)
}

/// Adds `c - 1` marked points on boundary component `kappa` (an edge whose
/// two ends are the same marked point) and the arcs i_{kappa,1..c-1} inside
/// the triangle bounded by it. For c = 2 the new arc joins the new point to
/// the opposite corner; for c >= 3 the first arc is a loop cutting off the
/// boundary, followed by a fan from the loop's end and one closing arc.
pub fn refine_boundary(tau: &Triangulation, kappa: usize, c: usize) -> Result<Triangulation> {
    if kappa >= tau.boundary.len() || kappa >= tau.surface.boundary.len() {
        return Err(Error::Precondition(format!(
            "no boundary component {}",
            kappa + 1
        )));
    }
    if tau.surface.boundary[kappa] != 1 {
        return Err(Error::Precondition(format!(
            "boundary component {} must carry one marked point",
            kappa + 1
        )));
    }
    if c == 0 {
        return Err(Error::Precondition(
            "marked point count must be positive".into(),
        ));
    }
    if c == 1 {
        return Ok(tau.clone());
    }
    let bedge = boundary_edge_of_component(tau, kappa)?;
    let ti = tau.triangle_with(bedge).unwrap();
    let t = tau.triangles[ti];
    let [b, x, y] = rotate(t, t.iter().position(|&e| e == bedge).unwrap());
    if !matches!(x, Edge::Arc(_)) || !matches!(y, Edge::Arc(_)) {
        return Err(Error::Precondition(
            "the boundary triangle must have two arc sides".into(),
        ));
    }
    let _ = b;
    let k = kappa + 1;
    let mut out = tau.clone();
    // Boundary edges e_1..e_c replace the old edge, clockwise from the point.
    let bi = match bedge {
        Edge::Boundary(i) => i,
        Edge::Arc(_) => unreachable!(),
    };
    out.boundary[bi] = format!("b{k}.1");
    let mut e = vec![Edge::Boundary(bi)];
    for s in 2..=c {
        e.push(Edge::Boundary(out.boundary.len()));
        out.boundary.push(format!("b{k}.{s}"));
    }
    let new_arc = |out: &mut Triangulation, s: usize| {
        out.arcs.push(format!("i{k}.{s}"));
        Edge::Arc(out.arcs.len() - 1)
    };
    out.triangles.remove(ti);
    if c == 2 {
        let d = new_arc(&mut out, 1);
        out.triangles.push([e[1], x, d]);
        out.triangles.push([d, y, e[0]]);
    } else {
        let ell = new_arc(&mut out, 1);
        out.triangles.push([ell, x, y]);
        // Inner polygon v0..v_c: side ell = v0 v1, e_s = v_s v_{s+1}.
        let mut diag: BTreeMap<usize, Edge> = BTreeMap::new(); // v0 v_k
        diag.insert(1, ell);
        for kk in 2..=c - 2 {
            let a = new_arc(&mut out, kk);
            diag.insert(kk, a);
        }
        let last = new_arc(&mut out, c - 1);
        // Fan triangles (v0, v_k, v_{k+1}) for k = 1..c-3.
        for kk in 1..=c - 3 {
            out.triangles.push([diag[&kk], e[kk - 1], diag[&(kk + 1)]]);
        }
        // (v0, v_{c-2}, v_c) and (v_{c-2}, v_{c-1}, v_c).
        out.triangles.push([diag[&(c - 2)], last, e[c - 1]]);
        out.triangles.push([e[c - 3], e[c - 2], last]);
    }
    out.surface.boundary[kappa] = c;
    out.validate()?;
    Ok(out)
}

fn boundary_edge_of_component(tau: &Triangulation, kappa: usize) -> Result<Edge> {
    // Components with one marked point keep the label b{kappa+1}.
    let label = format!("b{}", kappa + 1);
    tau.boundary
        .iter()
        .position(|b| *b == label)
        .map(Edge::Boundary)
        .ok_or_else(|| Error::Precondition(format!("no boundary edge labelled {label}")))
}

/// Inserts a puncture with a self-folded triangle at corner `corner` of
/// triangle `ti` (the corner where side `corner` starts). Returns the loop,
/// radius and third arc.
pub fn insert_puncture(
    tau: &Triangulation,
    ti: usize,
    corner: usize,
    labels: [&str; 3],
) -> Result<(Triangulation, [usize; 3])> {
    if ti >= tau.triangles.len() || corner > 2 {
        return Err(Error::Precondition("no such triangle corner".into()));
    }
    let t = tau.triangles[ti];
    if self_folded_parts(&t).is_some() {
        return Err(Error::Precondition(
            "cannot insert into a self-folded triangle".into(),
        ));
    }
    let [s1, s2, s3] = rotate(t, corner);
    let mut out = tau.clone();
    let base = out.arcs.len();
    for l in labels {
        out.arcs.push(l.to_string());
    }
    let (l, r, j) = (Edge::Arc(base), Edge::Arc(base + 1), Edge::Arc(base + 2));
    out.triangles.remove(ti);
    out.triangles.push([s1, s2, j]);
    out.triangles.push([j, s3, l]);
    out.triangles.push([l, r, r]);
    out.surface.punctures += 1;
    out.validate()?;
    Ok((out, [base, base + 1, base + 2]))
}

/// Adds `q` punctures next to boundary component `kappa`: the last one in a
/// self-folded triangle at the start of the last boundary edge of the
/// component, the others stacked between that loop and the third side of
/// the triangle it was inserted in.
pub fn add_punctures(tau: &Triangulation, kappa: usize, q: usize) -> Result<Triangulation> {
    let mut out = tau.clone();
    if q == 0 {
        return Ok(out);
    }
    let k = kappa + 1;
    let c = tau
        .surface
        .boundary
        .get(kappa)
        .copied()
        .ok_or_else(|| Error::Precondition(format!("no boundary component {k}")))?;
    let last_edge = if c == 1 {
        format!("b{k}")
    } else {
        format!("b{k}.{c}")
    };
    let e_last = Edge::Boundary(
        tau.boundary
            .iter()
            .position(|b| *b == last_edge)
            .ok_or_else(|| Error::Precondition(format!("no boundary edge {last_edge}")))?,
    );
    let lab = |t: usize, s: usize| format!("j{t}.{s}");
    // p_q: at the start of the last boundary edge.
    let ti = out.triangle_with(e_last).unwrap();
    let corner = out.triangles[ti].iter().position(|&e| e == e_last).unwrap();
    let far = out.triangles[ti][(corner + 2) % 3];
    let (next, [lq, _, _]) =
        insert_puncture(&out, ti, corner, [&lab(q, 1), &lab(q, 2), &lab(q, 3)])?;
    out = next;
    // p_1..p_{q-1}: stacked at the start of the side `far` next to the loop
    // of p_q, each new one between that side and the loop.
    for t in 1..q {
        let ti = out
            .triangles
            .iter()
            .position(|tr| {
                tr.contains(&far) && tr.contains(&Edge::Arc(lq)) && self_folded_parts(tr).is_none()
            })
            .ok_or_else(|| Error::Precondition("puncture anchor triangle missing".into()))?;
        let pos = out.triangles[ti].iter().position(|&e| e == far).unwrap();
        out = insert_puncture(&out, ti, pos, [&lab(t, 1), &lab(t, 2), &lab(t, 3)])?.0;
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CorankReport {
    pub n: usize,
    pub punctures: usize,
    pub even_components: usize,
    pub expected_rank: usize,
    pub rank: usize,
}

/// rank B = n - punctures - (boundary components with an even number of
/// marked points).
pub fn corank_check(tau: &Triangulation) -> Result<CorankReport> {
    tau.validate()?;
    let b = tau.b_matrix();
    let rank = RatMatrix::from_i64(&b).rank();
    let s = &tau.surface;
    let expected = tau.n() as i64 - s.punctures as i64 - s.even_components() as i64;
    let report = CorankReport {
        n: tau.n(),
        punctures: s.punctures,
        even_components: s.even_components(),
        expected_rank: expected.max(0) as usize,
        rank,
    };
    if expected != rank as i64 {
        return Err(Error::RankMismatch {
            expected: report.expected_rank,
            actual: rank,
        });
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ColumnExpression {
    pub arc: String,
    /// Why the column is dependent: "coinciding", "boundary" or "puncture".
    pub kind: String,
    pub terms: Vec<(String, String)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct NiceCertificate {
    pub route: NiceRoute,
    pub dependent: Vec<String>,
    pub expressions: Vec<ColumnExpression>,
    pub rank: usize,
    /// Arcs flipped by the fallback search, in order.
    pub flips: Vec<String>,
    pub construction_failure: Option<String>,
    pub kernel_cone: KernelConeReport,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum NiceRoute {
    /// Column identities of the boundary refinement and puncture insertion.
    Construction,
    /// Flip walk ending at a triangulation with a positive-image certificate.
    FlipSearch,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NiceTriangulation {
    pub triangulation: TriangulationSummary,
    pub certificate: NiceCertificate,
    #[serde(skip)]
    pub sigma: Triangulation,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TriangulationSummary {
    pub json: TriangulationJson,
    pub b_matrix: Vec<Vec<i64>>,
}

/// The construction of a triangulation whose matrix has no nonzero
/// nonnegative integer kernel vector: refine every boundary component,
/// then (if punctured) flip the last refining arc at one component and add
/// the punctures there. `base` must have one marked point per boundary
/// component and no punctures; it is generated for genus zero.
pub fn build_nice_triangulation(
    s: &MarkedSurface,
    base: Option<&Triangulation>,
) -> Result<NiceTriangulation> {
    let (sigma, dependent, expressions, rank) = match construct_nice(s, base) {
        Ok(c) => c,
        Err(e @ (Error::IdentityViolated(_) | Error::RankMismatch { .. })) => {
            return flip_search(s, base, e)
        }
        Err(e) => return Err(e),
    };
    let b = sigma.b_matrix();
    let kernel_cone = kernel_cone_trivial(&b)?;
    if !kernel_cone.trivial {
        return flip_search(
            s,
            base,
            Error::IdentityViolated("kernel cone is nontrivial".into()),
        );
    }
    Ok(NiceTriangulation {
        triangulation: TriangulationSummary {
            json: sigma.to_json(),
            b_matrix: b,
        },
        certificate: NiceCertificate {
            route: NiceRoute::Construction,
            dependent,
            expressions,
            rank,
            flips: Vec::new(),
            construction_failure: None,
            kernel_cone,
        },
        sigma,
    })
}

const FLIP_SEARCH_STEPS: usize = 20_000;

/// Seeded random flip walk from the constructed triangulation until the
/// kernel cone is trivial; used when a column identity of the construction
/// does not hold. The certificate is then the strictly positive image.
fn flip_search(
    s: &MarkedSurface,
    base: Option<&Triangulation>,
    why: Error,
) -> Result<NiceTriangulation> {
    use rand::{Rng, SeedableRng};
    let (_, mut t) = unchecked_construction(s, base)?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
    let mut flips = Vec::new();
    for _ in 0..FLIP_SEARCH_STEPS {
        let b = t.b_matrix();
        let kernel_cone = kernel_cone_trivial(&b)?;
        if kernel_cone.trivial {
            let rank = corank_check(&t)?.rank;
            return Ok(NiceTriangulation {
                triangulation: TriangulationSummary {
                    json: t.to_json(),
                    b_matrix: b,
                },
                certificate: NiceCertificate {
                    route: NiceRoute::FlipSearch,
                    dependent: Vec::new(),
                    expressions: Vec::new(),
                    rank,
                    flips,
                    construction_failure: Some(why.to_string()),
                    kernel_cone,
                },
                sigma: t,
            });
        }
        let k = rng.gen_range(0..t.n());
        let label = format!("f{}", flips.len() + 1);
        if let Ok(next) = t.flip_as(k, &label) {
            flips.push(t.arcs[k].clone());
            t = next;
        }
    }
    Err(why)
}

/// Dependent arcs, their column expressions and the rank, for the
/// triangulation built by refining the boundary and adding punctures.
type Construction = (Triangulation, Vec<String>, Vec<ColumnExpression>, usize);

fn construct_nice(s: &MarkedSurface, base: Option<&Triangulation>) -> Result<Construction> {
    let (tau0, sigma) = unchecked_construction(s, base)?;
    certify_construction(s, &tau0, &sigma)
}

fn unchecked_construction(
    s: &MarkedSurface,
    base: Option<&Triangulation>,
) -> Result<(Triangulation, Triangulation)> {
    if s.boundary.is_empty() {
        return Err(Error::Precondition(
            "the surface needs a nonempty boundary".into(),
        ));
    }
    let tau0 = match base {
        Some(t) => {
            if t.surface.genus != s.genus
                || t.surface.boundary.len() != s.boundary.len()
                || t.surface.boundary.iter().any(|&c| c != 1)
                || t.surface.punctures != 0
            {
                return Err(Error::Precondition("base triangulation must have one marked point per boundary component and no punctures".into()));
            }
            t.clone()
        }
        None if s.genus == 0 => genus_zero_base(s.boundary.len())?,
        None => return Err(Error::BaseTriangulationRequired),
    };
    let mut tau1 = tau0.clone();
    for (kappa, &c) in s.boundary.iter().enumerate() {
        tau1 = refine_boundary(&tau1, kappa, c)?;
    }
    let q = s.punctures;
    let kappa = s.boundary.iter().position(|c| c % 2 == 0).unwrap_or(0);
    let c_k = s.boundary[kappa];
    let sigma = if q == 0 {
        tau1
    } else {
        let tau2 = if c_k >= 2 {
            let i = tau1
                .arc_index(&format!("i{}.{}", kappa + 1, c_k - 1))
                .unwrap();
            tau1.flip(i)?
        } else {
            tau1
        };
        add_punctures(&tau2, kappa, q)?
    };
    sigma.validate()?;
    Ok((tau0, sigma))
}

fn certify_construction(
    s: &MarkedSurface,
    tau0: &Triangulation,
    sigma: &Triangulation,
) -> Result<Construction> {
    let q = s.punctures;
    let kappa = s.boundary.iter().position(|c| c % 2 == 0).unwrap_or(0);
    let c_k = s.boundary[kappa];
    let base_arcs: Vec<String> = tau0.arcs.clone();
    let mut sides = Vec::new();
    for kappa in 0..s.boundary.len() {
        // Sides of the triangle at each boundary component, in tau0.
        let e = boundary_edge_of_component(tau0, kappa)?;
        let t = tau0.triangles[tau0.triangle_with(e).unwrap()];
        let [_, x, y] = rotate(t, t.iter().position(|&z| z == e).unwrap());
        sides.push((tau0.label(x).to_string(), tau0.label(y).to_string()));
    }
    let b = sigma.b_matrix();
    let bm = RatMatrix::from_i64(&b);
    let idx = |l: &str| sigma.arc_index(l).expect("constructed arc");
    let col = |i: usize| bm.col(i);
    let n = sigma.n();
    // Dependent set and the raw identities, before expanding e_t - e_s.
    let mut dependent: Vec<String> = Vec::new();
    let mut expressions = Vec::new();
    let mut pending: Vec<(String, &'static str, Vec<String>, Option<(String, String)>)> =
        Vec::new();
    for (kk, &c) in s.boundary.iter().enumerate() {
        if c % 2 != 0 || (q > 0 && kk == kappa) {
            continue;
        }
        let k = kk + 1;
        let summands: Vec<String> = (1..=(c - 2) / 2)
            .map(|l| format!("i{k}.{}", 2 * l - 1))
            .collect();
        pending.push((
            format!("i{k}.{}", c - 1),
            "boundary",
            summands,
            Some(sides[kk].clone()),
        ));
    }
    if q > 0 {
        for l in 1..q {
            pending.push((
                format!("j{l}.2"),
                "coinciding",
                vec![format!("j{l}.1")],
                None,
            ));
        }
        if c_k.is_multiple_of(2) {
            let k = kappa + 1;
            let mut summands: Vec<String> = (1..q).map(|t| format!("j{t}.1")).collect();
            summands.extend((1..=(c_k - 2) / 2).map(|l| format!("i{k}.{}", 2 * l - 1)));
            summands.push(format!("i{k}.{}'", c_k - 1));
            pending.push((
                format!("j{q}.1"),
                "puncture",
                summands.clone(),
                Some(sides[kappa].clone()),
            ));
            pending.push((
                format!("j{q}.2"),
                "puncture",
                summands,
                Some(sides[kappa].clone()),
            ));
        } else {
            pending.push((
                format!("j{q}.2"),
                "coinciding",
                vec![format!("j{q}.1")],
                None,
            ));
        }
    }
    for (target, _, _, _) in &pending {
        dependent.push(target.clone());
    }
    let base_cols: Vec<usize> = base_arcs.iter().map(|l| idx(l)).collect();
    for (target, kind, summands, diff) in pending {
        let mut coeffs = vec![Rat::zero(); n];
        let mut residual = col(idx(&target));
        for sname in &summands {
            let i = idx(sname);
            coeffs[i] += Rat::one();
            for (r, v) in residual.iter_mut().zip(col(i)) {
                *r -= v;
            }
        }
        if let Some((t, s_)) = diff {
            let mut want = vec![Rat::zero(); n];
            want[idx(&t)] += Rat::one();
            want[idx(&s_)] -= Rat::one();
            if residual != want {
                return Err(Error::IdentityViolated(format!(
                    "column of {target} minus its summands is not e_{t} - e_{s_}"
                )));
            }
            let a = bm.select_cols(&base_cols);
            let x = lp_feasible(&a, &want).ok_or_else(|| {
                Error::IdentityViolated(format!(
                    "e_{t} - e_{s_} is not a nonnegative combination of base columns"
                ))
            })?;
            for (c, &i) in x.iter().zip(&base_cols) {
                coeffs[i] += c;
            }
        } else if residual.iter().any(|x| !x.is_zero()) {
            return Err(Error::IdentityViolated(format!(
                "columns of {target} and {} differ",
                summands[0]
            )));
        }
        // Exact check of the final combination.
        let mut acc = vec![Rat::zero(); n];
        for (i, c) in coeffs.iter().enumerate() {
            if !c.is_zero() {
                if dependent.contains(&sigma.arcs[i]) {
                    return Err(Error::IdentityViolated(format!(
                        "{target} uses dependent column {}",
                        sigma.arcs[i]
                    )));
                }
                for (a, v) in acc.iter_mut().zip(col(i)) {
                    *a += c * v;
                }
            }
        }
        if acc != col(idx(&target)) {
            return Err(Error::IdentityViolated(format!(
                "combination for {target} does not reproduce its column"
            )));
        }
        expressions.push(ColumnExpression {
            arc: target,
            kind: kind.to_string(),
            terms: coeffs
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(i, c)| (sigma.arcs[i].clone(), fmt_rat(c)))
                .collect(),
        });
    }
    let rank = corank_check(sigma)?.rank;
    if n - rank != dependent.len() {
        return Err(Error::RankMismatch {
            expected: n - dependent.len(),
            actual: rank,
        });
    }
    Ok((sigma.clone(), dependent, expressions, rank))
}

/// The gentle QP of an unpunctured triangulation: one arrow per pair of
/// adjacent arcs in each triangle, the clockwise 3-cycle of every interior
/// triangle in the potential.
pub fn gentle_qp(tau: &Triangulation, p: usize) -> Result<QP> {
    if !tau.radius_loops().is_empty() {
        return Err(Error::Precondition(
            "self-folded triangles have no gentle QP here".into(),
        ));
    }
    let mut arrows = Vec::new();
    let mut potential = Potential::new();
    let mut count = 0;
    let mut pairs: HashMap<(usize, usize), usize> = HashMap::new();
    for t in &tau.triangles {
        let mut cyc = Vec::new();
        for k in 0..3 {
            if let (Edge::Arc(x), Edge::Arc(y)) = (t[k], t[(k + 1) % 3]) {
                // b[x][y] += 1 means an arrow y -> x.
                count += 1;
                *pairs.entry((y, x)).or_insert(0) += 1;
                cyc.push(arrows.len());
                arrows.push(Arrow {
                    id: format!("{}>{}#{count}", tau.arcs[y], tau.arcs[x]),
                    source: y,
                    target: x,
                });
            }
        }
        if cyc.len() == 3 {
            // Arrows s2->s1, s3->s2, s1->s3 in application order s1->s3->s2->s1.
            potential.add_cycle(Rat::one(), &[cyc[2], cyc[1], cyc[0]]);
        }
    }
    if pairs.keys().any(|&(a, b)| pairs.contains_key(&(b, a))) {
        return Err(Error::NotGentle(
            "the triangulation produces 2-cycles".into(),
        ));
    }
    let quiver = Quiver::new(tau.n(), 0, arrows)?;
    QP::new(quiver, potential, p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::frac;

    fn ex69(k: usize) -> Vec<Vec<i64>> {
        match k {
            0 => vec![vec![0, 2], vec![-2, 0]],
            1 => vec![vec![0, 1, 1], vec![-1, 0, -1], vec![-1, 1, 0]],
            2 => vec![
                vec![0, 2, -1, 0],
                vec![-2, 0, 1, 0],
                vec![1, -1, 0, 1],
                vec![0, 0, -1, 0],
            ],
            _ => vec![
                vec![0, 2, -1, 0, 0],
                vec![-2, 0, 1, 0, 0],
                vec![1, -1, 0, -1, 0],
                vec![0, 0, 1, 0, 1],
                vec![0, 0, 0, -1, 0],
            ],
        }
    }

    fn annulus(c: [usize; 2]) -> MarkedSurface {
        MarkedSurface {
            genus: 0,
            boundary: c.to_vec(),
            punctures: 0,
        }
    }

    #[test]
    fn annuli_matrices() {
        for (k, c) in [[1, 1], [1, 2], [1, 3], [1, 4]].into_iter().enumerate() {
            let t = refine_boundary(&annulus_base(), 1, c[1]).unwrap();
            assert_eq!(t.b_matrix(), ex69(k), "c = {c:?}");
            assert!(corank_check(&t).is_ok());
        }
    }

    #[test]
    fn certificates_for_annuli() {
        let nice = build_nice_triangulation(&annulus([1, 2]), None).unwrap();
        let e = &nice.certificate.expressions[0];
        assert_eq!(e.arc, "i2.1");
        assert_eq!(
            e.terms,
            vec![
                ("a1".to_string(), "1".to_string()),
                ("a2".to_string(), "1".to_string())
            ]
        );
        let nice = build_nice_triangulation(&annulus([1, 4]), None).unwrap();
        let e = &nice.certificate.expressions[0];
        assert_eq!(e.arc, "i2.3");
        let half = fmt_rat(&frac(1, 2));
        assert_eq!(
            e.terms,
            vec![
                ("a1".to_string(), half.clone()),
                ("a2".to_string(), half),
                ("i2.1".to_string(), "1".to_string())
            ]
        );
        assert!(nice.certificate.kernel_cone.trivial);
    }

    #[test]
    fn flips_match_mutation() {
        let t = refine_boundary(&annulus_base(), 1, 2).unwrap();
        for k in 0..t.n() {
            let f = t.flip(k).unwrap();
            assert_eq!(f.exchange_matrix(), t.exchange_matrix().mutate(k).unwrap());
            let back = f.flip(k).unwrap();
            assert_eq!(back.b_matrix(), t.b_matrix());
        }
    }

    #[test]
    fn flips_match_mutation_with_punctures() {
        let s = MarkedSurface {
            genus: 0,
            boundary: vec![2, 4, 3],
            punctures: 2,
        };
        let nice = build_nice_triangulation(&s, None).unwrap();
        assert_eq!(
            nice.certificate.dependent.len(),
            s.punctures + s.even_components()
        );
        let t = nice.sigma;
        let mut flipped = 0;
        for k in 0..t.n() {
            match t.flip(k) {
                Ok(f) => {
                    flipped += 1;
                    assert_eq!(
                        f.exchange_matrix(),
                        t.exchange_matrix().mutate(k).unwrap(),
                        "arc {}",
                        t.arcs[k]
                    );
                    assert!(corank_check(&f).is_ok());
                }
                Err(e) => assert!(matches!(e, Error::NotFlippable(_))),
            }
        }
        assert_eq!(flipped, t.n() - 2);
    }

    #[test]
    fn square_disc_flip() {
        let s = MarkedSurface {
            genus: 0,
            boundary: vec![4],
            punctures: 0,
        };
        let t = Triangulation::new(
            s,
            vec!["d".into()],
            (1..=4).map(|i| format!("e{i}")).collect(),
            vec![
                [Edge::Boundary(0), Edge::Boundary(1), Edge::Arc(0)],
                [Edge::Arc(0), Edge::Boundary(2), Edge::Boundary(3)],
            ],
        )
        .unwrap();
        let f = t.flip(0).unwrap();
        assert_eq!(f.arcs, vec!["d'".to_string()]);
        assert_eq!(f.b_matrix(), vec![vec![0]]);
        assert!(f
            .triangles
            .iter()
            .any(|tr| tr.contains(&Edge::Boundary(1)) && tr.contains(&Edge::Boundary(2))));
    }

    #[test]
    fn punctured_constructions() {
        for c in 1..=6 {
            for q in 0..=3 {
                let s = MarkedSurface {
                    genus: 0,
                    boundary: vec![1, c],
                    punctures: q,
                };
                let nice = build_nice_triangulation(&s, None)
                    .unwrap_or_else(|e| panic!("c={c} q={q}: {e}"));
                assert!(nice.certificate.kernel_cone.trivial);
                let loops = nice.sigma.radius_loops();
                assert_eq!(loops.len(), q);
                for (&r, &l) in &loops {
                    let b = nice.sigma.b_matrix();
                    assert!((0..b.len()).all(|i| b[i][r] == b[i][l]));
                }
            }
        }
    }

    #[test]
    fn genus_zero_bases() {
        for b in 2..=4 {
            let t = genus_zero_base(b).unwrap();
            assert!(corank_check(&t).is_ok());
            let s = MarkedSurface {
                genus: 0,
                boundary: (0..b).map(|i| i + 1).collect(),
                punctures: 1,
            };
            assert!(build_nice_triangulation(&s, None).is_ok(), "b = {b}");
        }
        assert_eq!(
            genus_zero_base(1).unwrap_err(),
            Error::BaseTriangulationRequired
        );
    }

    #[test]
    fn flip_search_when_identities_fail() {
        use crate::cone::KernelConeCertificate;
        // Refining both ends of the annulus removes the arrows the other
        // component's identity relies on; the kernel cone is nontrivial.
        let mut tau1 = refine_boundary(&annulus_base(), 0, 2).unwrap();
        tau1 = refine_boundary(&tau1, 1, 2).unwrap();
        assert!(!kernel_cone_trivial(&tau1.b_matrix()).unwrap().trivial);
        for s in [
            annulus([2, 2]),
            MarkedSurface {
                genus: 0,
                boundary: vec![2, 1, 1],
                punctures: 0,
            },
        ] {
            let nice = build_nice_triangulation(&s, None).unwrap();
            let cert = &nice.certificate;
            assert_eq!(cert.route, NiceRoute::FlipSearch);
            assert!(cert.construction_failure.is_some() && !cert.flips.is_empty());
            nice.sigma.validate().unwrap();
            assert_eq!(nice.sigma.n(), s.arc_count().unwrap());
            assert_eq!(cert.rank, corank_check(&nice.sigma).unwrap().rank);
            let KernelConeCertificate::PositiveImage { y, image } = &cert.kernel_cone.certificate
            else {
                panic!("expected a positive image")
            };
            let y: Vec<Rat> = y
                .iter()
                .map(|v| crate::linalg::parse_rat(v).unwrap())
                .collect();
            let by = RatMatrix::from_i64(&nice.triangulation.b_matrix).mul_vec(&y);
            assert_eq!(by.iter().map(fmt_rat).collect::<Vec<_>>(), *image);
            assert!(by.iter().all(|v| *v > Rat::zero()));
        }
        let nice = build_nice_triangulation(&annulus([1, 2]), None).unwrap();
        assert_eq!(nice.certificate.route, NiceRoute::Construction);
    }

    #[test]
    fn gentle_qp_bypasses() {
        use crate::qp::gentle::{bypass_column_identity, find_bypasses, BypassKind};
        let qp = gentle_qp(&annulus_base(), 12).unwrap();
        let found = find_bypasses(&qp).unwrap();
        assert_eq!(
            found
                .iter()
                .filter(|b| b.kind == BypassKind::Bypass)
                .count(),
            2
        );
        let t = refine_boundary(&annulus_base(), 1, 2).unwrap();
        let qp = gentle_qp(&t, 12).unwrap();
        let found = find_bypasses(&qp).unwrap();
        assert_eq!(
            found
                .iter()
                .filter(|b| b.kind == BypassKind::AlmostBypass)
                .count(),
            1
        );
        for b in &found {
            bypass_column_identity(&qp, b).unwrap();
        }
    }

    #[test]
    fn json_round_trip() {
        let s = MarkedSurface {
            genus: 0,
            boundary: vec![1, 2],
            punctures: 1,
        };
        let nice = build_nice_triangulation(&s, None).unwrap();
        let j = nice.sigma.to_json();
        assert_eq!(j.self_folded.len(), 1);
        let back = Triangulation::from_json(&j).unwrap();
        assert_eq!(back, nice.sigma);
    }
}
