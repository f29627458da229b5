//! File loading and the machine-readable error object.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use clustercc_core::qp::{QpJson, DEFAULT_TRUNCATION, QP};
use clustercc_core::rep::{DecoratedRep, RepJson};
use clustercc_core::seed::ExchangeMatrix;
use clustercc_core::surface::{Triangulation, TriangulationJson};
use clustercc_core::Error;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CliError {
    pub error: String,
    pub message: String,
}

impl CliError {
    pub fn new(code: &str, message: impl Into<String>) -> Self {
        CliError {
            error: code.into(),
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::new(e.code(), e.to_string())
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.error, self.message)
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::new("Io", format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::new("Parse", format!("{}: {e}", path.display())))
}

/// Builds a QP; `truncation` replaces the default order when the file has no `p`.
pub fn qp_from_json(mut j: QpJson, truncation: Option<usize>) -> CliResult<QP> {
    if j.p.is_none() {
        j.p = Some(truncation.unwrap_or(DEFAULT_TRUNCATION));
    }
    Ok(QP::from_json(&j)?)
}

/// Truncation for computations with representations of the given total
/// dimension: the explicit value if any, else max(default, dim + 2).
pub fn truncation_for(truncation: Option<usize>, total_dim: usize) -> Option<usize> {
    Some(truncation.unwrap_or(DEFAULT_TRUNCATION.max(total_dim + 2)))
}

/// `truncation_for` over the summed total dimensions of the rep files.
pub fn truncation_for_reps(truncation: Option<usize>, reps: &[&Path]) -> CliResult<Option<usize>> {
    if truncation.is_some() {
        return Ok(truncation);
    }
    let mut total = 0;
    for r in reps {
        let j: RepJson = read_json(r)?;
        total += j.dims.iter().sum::<usize>();
    }
    Ok(truncation_for(None, total))
}

pub fn load_qp(path: &Path, truncation: Option<usize>) -> CliResult<QP> {
    qp_from_json(read_json(path)?, truncation)
}

/// Reads a representation over `qp`, or over its restriction (frozen
/// vertices then get zero spaces).
pub fn load_rep(path: &Path, qp: &QP) -> CliResult<DecoratedRep> {
    rep_from_json(&read_json(path)?, qp)
}

pub fn rep_from_json(j: &RepJson, qp: &QP) -> CliResult<DecoratedRep> {
    if j.dims.len() == qp.n() && qp.total() > qp.n() {
        let res = qp.restrict();
        let rep = DecoratedRep::from_json(j, &res)?;
        return Ok(rep.transport(&res, qp)?);
    }
    Ok(DecoratedRep::from_json(j, qp)?)
}

pub fn load_matrix(path: &Path) -> CliResult<ExchangeMatrix> {
    let b: ExchangeMatrix = read_json(path)?;
    b.validate()?;
    Ok(b)
}

pub fn load_triangulation(path: &Path) -> CliResult<Triangulation> {
    let j: TriangulationJson = read_json(path)?;
    Ok(Triangulation::from_json(&j)?)
}

/// Converts a 1-based vertex to 0-based, rejecting 0.
pub fn vertex(k: usize) -> CliResult<usize> {
    k.checked_sub(1).ok_or_else(|| Error::KOutOfRange(0).into())
}

pub fn vertices(seq: &[usize]) -> CliResult<Vec<usize>> {
    seq.iter().map(|&k| vertex(k)).collect()
}
