//! Single-session mutation state behind the HTTP server.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use clustercc_core::qp::{mutate_qp, QpJson, QP};
use clustercc_core::rep::{cc_function, g_vector, mutate_rep, ChiMethod, DecoratedRep, RepJson};
use clustercc_core::seed::{ExchangeMatrix, Seed};
use clustercc_core::Error;

use crate::io::{qp_from_json, rep_from_json, truncation_for, vertex, CliError, CliResult};

/// Wire form of a session: initial data plus the 1-based mutation history.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<ExchangeMatrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qp: Option<QpJson>,
    #[serde(default)]
    pub reps: BTreeMap<String, RepJson>,
    #[serde(default)]
    pub history: Vec<usize>,
}

#[derive(Clone, Debug)]
struct Snapshot {
    seed: Seed,
    qp: Option<QP>,
    /// `None` once a mutation was not defined for the representation.
    reps: BTreeMap<String, Option<DecoratedRep>>,
}

#[derive(Clone, Debug)]
pub struct Session {
    initial: SessionJson,
    stack: Vec<Snapshot>,
    history: Vec<usize>,
}

impl Session {
    pub fn load(j: &SessionJson, truncation: Option<usize>) -> CliResult<Self> {
        let largest = j
            .reps
            .values()
            .map(|r| r.dims.iter().sum::<usize>())
            .max()
            .unwrap_or(0);
        let truncation = truncation_for(truncation, largest);
        let qp =
            j.qp.clone()
                .map(|q| qp_from_json(q, truncation))
                .transpose()?;
        let matrix = match (&j.matrix, &qp) {
            (Some(b), Some(q)) => {
                b.validate()?;
                if *b != q.quiver.b_matrix() {
                    return Err(Error::ShapeMismatch(
                        "matrix differs from the quiver's exchange matrix".into(),
                    )
                    .into());
                }
                b.clone()
            }
            (Some(b), None) => {
                b.validate()?;
                b.clone()
            }
            (None, Some(q)) => q.quiver.b_matrix(),
            (None, None) => return Err(CliError::new("Usage", "a session needs a matrix or a QP")),
        };
        let mut reps = BTreeMap::new();
        for (id, r) in &j.reps {
            let q = qp
                .as_ref()
                .ok_or_else(|| CliError::new("Usage", "representations need a QP"))?;
            reps.insert(id.clone(), Some(rep_from_json(r, q)?));
        }
        let mut initial = j.clone();
        initial.history.clear();
        let mut s = Session {
            initial,
            stack: vec![Snapshot {
                seed: Seed::initial(matrix),
                qp,
                reps,
            }],
            history: vec![],
        };
        for &k in &j.history {
            s.mutate(k)?;
        }
        Ok(s)
    }

    fn current(&self) -> &Snapshot {
        self.stack.last().expect("initial snapshot")
    }

    pub fn history(&self) -> &[usize] {
        &self.history
    }

    /// Mutates seed, QP and representations at the 1-based vertex `k`.
    pub fn mutate(&mut self, k: usize) -> CliResult<()> {
        let cur = self.current();
        let k0 = vertex(k)?;
        if k0 >= cur.seed.matrix.n {
            return Err(Error::KOutOfRange(k).into());
        }
        let seed = cur.seed.mutate(k0)?;
        let (qp, reps) = match &cur.qp {
            Some(q) => {
                if q.quiver.has_two_cycle_at(k0) {
                    return Err(Error::TwoCycleAtK(k).into());
                }
                let next = mutate_qp(q, k0)?.qp().clone();
                let reps = cur
                    .reps
                    .iter()
                    .map(|(id, r)| {
                        let m = r
                            .as_ref()
                            .and_then(|r| mutate_rep(r, q, k0).ok())
                            .map(|m| m.rep);
                        (id.clone(), m)
                    })
                    .collect();
                (Some(next), reps)
            }
            None => (None, cur.reps.clone()),
        };
        self.stack.push(Snapshot { seed, qp, reps });
        self.history.push(k);
        Ok(())
    }

    pub fn undo(&mut self) -> CliResult<()> {
        if self.history.is_empty() {
            return Err(CliError::new("NothingToUndo", "the history is empty"));
        }
        self.stack.pop();
        self.history.pop();
        Ok(())
    }

    pub fn to_json(&self) -> SessionJson {
        SessionJson {
            history: self.history.clone(),
            ..self.initial.clone()
        }
    }

    pub fn state(&self) -> Value {
        let cur = self.current();
        let b = &cur.seed.matrix;
        let g: BTreeMap<&String, Option<Vec<i64>>> = cur
            .reps
            .iter()
            .map(|(id, r)| {
                (
                    id,
                    r.as_ref().zip(cur.qp.as_ref()).map(|(r, q)| g_vector(r, q)),
                )
            })
            .collect();
        json!({
            "n": b.n,
            "m": b.m,
            "matrix": b.rows,
            "cluster": cur.seed.cluster.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            "quiver": cur.qp.as_ref().map(|q| q.to_json()),
            "gVectors": g,
            "history": self.history,
            "session": self.to_json(),
        })
    }

    /// The QP and representation `id` at the current state, for computing
    /// outside the session lock.
    pub fn rep(&self, id: &str) -> CliResult<(QP, DecoratedRep)> {
        let cur = self.current();
        let r = cur
            .reps
            .get(id)
            .ok_or_else(|| CliError::new("UnknownRep", format!("no representation {id}")))?;
        let r = r.clone().ok_or_else(|| {
            CliError::new(
                "NotApplicable",
                format!("{id} has no mutation along this history"),
            )
        })?;
        Ok((cur.qp.clone().expect("reps imply a QP"), r))
    }
}

pub fn cc_value(qp: &QP, rep: &DecoratedRep) -> CliResult<Value> {
    let f = cc_function(rep, qp, ChiMethod::Auto)?;
    Ok(json!({ "cc": f.to_json(), "text": f.to_string() }))
}
