//! Interval bound propagation over an inequality network of knot invariants.
//!
//! Values are ingested from KnotInfo-style exports ([`ingest`]), tightened to
//! the fixed point of the graph's inequalities and parity rules
//! ([`propagate`]), mined for new candidate inequalities ([`mine`]) and
//! explained or checked against published lists ([`report`]).

pub mod graph;
pub mod ingest;
pub mod mine;
pub mod model;
pub mod propagate;
pub mod report;

pub use graph::{Edge, GraphError, InequalityGraph};
pub use ingest::{ColumnMapping, IngestError, SupplementTable};
pub use mine::{Conjecture, ExclusionList, MineError, MineOptions, Status};
pub use model::{
    Bound, Interval, KnotDatabase, KnotId, KnotRecord, ModelError, Parity, ParityTable, PropagationEvent, Registry,
    VertexIdx,
};
pub use propagate::{Diff, DiffCategory, PropagateError, PropagateOptions, Propagation};
pub use report::{GoldenList, ReportError};

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Propagate(#[from] PropagateError),
    #[error(transparent)]
    Mine(#[from] MineError),
    #[error(transparent)]
    Report(#[from] ReportError),
}

/// Checks that graph, registry, parity table and column mapping agree: the
/// same vertex set everywhere and one parity entry per vertex.
pub fn validate_config(
    g: &InequalityGraph,
    registry: &Registry,
    parity: &ParityTable,
    mapping: &ColumnMapping,
) -> Result<(), Error> {
    for id in g.vertices() {
        registry.require(id)?;
    }
    for def in registry.defs() {
        if g.vertex_index(&def.id).is_none() {
            return Err(ModelError::UnknownVertex(def.id.clone()).into());
        }
    }
    let mut seen = std::collections::HashSet::new();
    for (id, _) in &parity.entries {
        registry.require(id)?;
        if !seen.insert(id.as_str()) {
            return Err(ModelError::DuplicateVertex(id.clone()).into());
        }
    }
    if let Some(def) = registry.defs().iter().find(|d| !seen.contains(d.id.as_str())) {
        return Err(ModelError::UnknownVertex(def.id.clone()).into());
    }
    mapping.validate(registry)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_config_is_consistent() {
        let reg = Registry::standard();
        let parity = ParityTable::bundled();
        validate_config(&InequalityGraph::bundled(), &reg, &parity, &ColumnMapping::bundled()).unwrap();
        assert_eq!(parity.len(), 33);
        let mut applied = reg.clone();
        applied.apply_parity_table(&parity).unwrap();
        assert_eq!(applied, reg);
    }

    #[test]
    fn parity_table_must_cover_registry() {
        let mut parity = ParityTable::bundled();
        parity.entries.pop();
        let err = validate_config(
            &InequalityGraph::bundled(),
            &Registry::standard(),
            &parity,
            &ColumnMapping::bundled(),
        );
        assert!(err.is_err());
    }
}
