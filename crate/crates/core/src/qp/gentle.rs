//! Gentle pairs, bypasses and the column identity they force.

use std::collections::BTreeSet;

use serde::Serialize;

use super::QP;
use crate::error::{Error, Result};

/// Relations of a potential: the length-2 paths `[a, b]` (apply `a`, then
/// `b`) appearing in cyclic derivatives. `None` if some derivative is not a
/// single length-2 path up to scalar.
pub fn relations(qp: &QP) -> Option<BTreeSet<(usize, usize)>> {
    let mut rel = BTreeSet::new();
    for a in 0..qp.quiver.arrows.len() {
        let d = qp.cyclic_derivative(a);
        match d.len() {
            0 => {}
            1 => {
                let path = d.keys().next().unwrap();
                if path.len() != 2 {
                    return None;
                }
                rel.insert((path[0], path[1]));
            }
            _ => return None,
        }
    }
    Some(rel)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GentleReport {
    pub gentle: bool,
    /// First failing condition, if any.
    pub reason: Option<String>,
}

pub fn gentle_report(qp: &QP) -> GentleReport {
    match check_gentle(qp) {
        Ok(()) => GentleReport {
            gentle: true,
            reason: None,
        },
        Err(r) => GentleReport {
            gentle: false,
            reason: Some(r),
        },
    }
}

pub fn is_gentle(qp: &QP) -> bool {
    check_gentle(qp).is_ok()
}

fn check_gentle(qp: &QP) -> std::result::Result<(), String> {
    let q = &qp.quiver;
    let t = q.total();
    for v in 0..t {
        if q.has_loop_at(v) {
            return Err(format!("loop at vertex {}", v + 1));
        }
        if q.arrows_into(v).len() > 2 {
            return Err(format!(
                "vertex {} is the head of more than two arrows",
                v + 1
            ));
        }
        if q.arrows_out_of(v).len() > 2 {
            return Err(format!(
                "vertex {} is the tail of more than two arrows",
                v + 1
            ));
        }
    }
    let rel = relations(qp).ok_or("relations are not single paths of length 2")?;
    for a in 0..q.arrows.len() {
        // Two continuations of a: exactly one is a relation.
        let after = q.arrows_out_of(q.target(a));
        if after.len() == 2 {
            let c = after.iter().filter(|&&b| rel.contains(&(a, b))).count();
            if c != 1 {
                return Err(format!(
                    "arrow {} has {c} relations among its two continuations",
                    q.arrows[a].id
                ));
            }
        }
        let before = q.arrows_into(q.source(a));
        if before.len() == 2 {
            let c = before.iter().filter(|&&b| rel.contains(&(b, a))).count();
            if c != 1 {
                return Err(format!(
                    "arrow {} has {c} relations among its two predecessors",
                    q.arrows[a].id
                ));
            }
        }
    }
    // Finite dimension: the graph on arrows with an edge a -> b whenever
    // [a, b] composes and is not a relation must be acyclic.
    let n = q.arrows.len();
    let succ: Vec<Vec<usize>> = (0..n)
        .map(|a| {
            q.arrows_out_of(q.target(a))
                .into_iter()
                .filter(|&b| !rel.contains(&(a, b)))
                .collect()
        })
        .collect();
    let mut state = vec![0u8; n];
    fn dfs(v: usize, succ: &[Vec<usize>], state: &mut [u8]) -> bool {
        state[v] = 1;
        for &w in &succ[v] {
            if state[w] == 1 || (state[w] == 0 && !dfs(w, succ, state)) {
                return false;
            }
        }
        state[v] = 2;
        true
    }
    for a in 0..n {
        if state[a] == 0 && !dfs(a, &succ, &mut state) {
            return Err(
                "a relation-free cyclic path exists, so the algebra is infinite dimensional".into(),
            );
        }
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum BypassKind {
    Bypass,
    AlmostBypass,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Bypass {
    /// Arrows of the path in application order.
    pub path: Vec<usize>,
    pub kind: BypassKind,
    /// The closing arrow, or the two closing arrows of an almost bypass.
    pub closing: Vec<usize>,
    pub source: usize,
    pub sink: usize,
}

impl Bypass {
    /// The vertices j_1, ..., j_m: sources of the path arrows, then the sink.
    pub fn vertices(&self, qp: &QP) -> Vec<usize> {
        let mut v: Vec<usize> = self.path.iter().map(|&a| qp.quiver.source(a)).collect();
        v.push(self.sink);
        v
    }
}

/// All bypasses and almost bypasses of a gentle QP with at most `p` arrows.
pub fn find_bypasses(qp: &QP) -> Result<Vec<Bypass>> {
    if let Err(r) = check_gentle(qp) {
        return Err(Error::NotGentle(r));
    }
    let q = &qp.quiver;
    let rel = relations(qp).unwrap();
    let n = q.arrows.len();
    let mut out = Vec::new();
    // Relation-free paths (finite, since the algebra is finite dimensional).
    let mut stack: Vec<Vec<usize>> = (0..n).map(|a| vec![a]).collect();
    while let Some(path) = stack.pop() {
        let first = path[0];
        let last = *path.last().unwrap();
        let (s, t) = (q.source(first), q.target(last));
        for c in 0..n {
            if c != first && c != last && q.source(c) == s && q.target(c) == t {
                out.push(Bypass {
                    path: path.clone(),
                    kind: BypassKind::Bypass,
                    closing: vec![c],
                    source: s,
                    sink: t,
                });
            }
        }
        for c1 in 0..n {
            if c1 == first || c1 == last || q.source(c1) != s {
                continue;
            }
            let mid = q.target(c1);
            let incident: Vec<usize> = (0..n)
                .filter(|&x| q.source(x) == mid || q.target(x) == mid)
                .collect();
            for c2 in 0..n {
                if c2 == first || c2 == last || c2 == c1 || q.source(c2) != mid || q.target(c2) != t
                {
                    continue;
                }
                if rel.contains(&(c1, c2)) || incident.len() != 2 {
                    continue;
                }
                out.push(Bypass {
                    path: path.clone(),
                    kind: BypassKind::AlmostBypass,
                    closing: vec![c1, c2],
                    source: s,
                    sink: t,
                });
            }
        }
        if path.len() < qp.p {
            for b in q.arrows_out_of(t) {
                if !rel.contains(&(last, b)) {
                    let mut np = path.clone();
                    np.push(b);
                    stack.push(np);
                }
            }
        }
    }
    out.sort_by(|a, b| {
        (a.path.len(), &a.path, &a.closing).cmp(&(b.path.len(), &b.path, &b.closing))
    });
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ColumnIdentityReport {
    pub kind: BypassKind,
    /// 0-based vertices j_1..j_m.
    pub vertices: Vec<usize>,
    pub lhs: Vec<i64>,
    pub rhs: Vec<i64>,
}

/// Checks that the columns of B indexed by the bypass vertices sum to
/// 2(e_sink - e_source) for a bypass and e_sink - e_source for an almost
/// bypass.
pub fn bypass_column_identity(qp: &QP, pi: &Bypass) -> Result<ColumnIdentityReport> {
    let b = qp.quiver.skew_matrix();
    let t = qp.quiver.total();
    let vertices = pi.vertices(qp);
    let mut lhs = vec![0i64; t];
    for &j in &vertices {
        for (i, x) in lhs.iter_mut().enumerate() {
            *x += b[i][j];
        }
    }
    let factor = match pi.kind {
        BypassKind::Bypass => 2,
        BypassKind::AlmostBypass => 1,
    };
    let mut rhs = vec![0i64; t];
    rhs[pi.source] -= factor;
    rhs[pi.sink] += factor;
    if lhs != rhs {
        return Err(Error::IdentityViolated(format!(
            "column sum {lhs:?} differs from {rhs:?}"
        )));
    }
    Ok(ColumnIdentityReport {
        kind: pi.kind,
        vertices,
        lhs,
        rhs,
    })
}
