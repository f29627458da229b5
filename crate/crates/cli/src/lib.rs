//! Command implementations, session state and the HTTP server behind the
//! `clustercc` binary.

pub mod commands;
pub mod io;
pub mod serve;
pub mod session;

use std::collections::BTreeMap;

use clustercc_core::fixtures::two_triangles;
use clustercc_core::rep::DecoratedRep;

use session::SessionJson;

/// The two-triangle quiver with one frozen vertex and its three simples.
pub fn default_session() -> SessionJson {
    let qp = two_triangles();
    let reps: BTreeMap<_, _> = (0..qp.n())
        .map(|k| {
            (
                format!("S{}", k + 1),
                DecoratedRep::simple(&qp, k).to_json(&qp),
            )
        })
        .collect();
    SessionJson {
        matrix: None,
        qp: Some(qp.to_json()),
        reps,
        history: vec![],
    }
}
