//! Explanations of derived bounds and comparison against published knot lists.

mod golden;

pub use golden::{check_golden, GoldenList, GoldenOutcome, GoldenReport};

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::graph::InequalityGraph;
use crate::model::{from_vertex, Cause, Interval, KnotDatabase, KnotId, PropagationEvent, Side, VertexIdx};

/// Longest premise walk per bound before the chain is cut.
pub const MAX_DEPTH: usize = 20;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ReportError {
    #[error("unknown knot {0}")]
    UnknownKnot(String),
    #[error("unknown vertex {0:?}")]
    UnknownVertex(String),
    #[error("golden list line {line}: {message}")]
    Golden { line: usize, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExplainStep {
    /// Position in the provenance log.
    pub seq: usize,
    pub event: PropagationEvent,
    pub vertex_id: String,
    /// Citation of the edge, for edge causes.
    pub citation: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Explanation {
    pub knot: KnotId,
    pub vertex: VertexIdx,
    pub vertex_id: String,
    pub current: Interval,
    /// Causes of the current bounds in log order; empty when nothing beyond
    /// ingest touched the vertex.
    pub steps: Vec<ExplainStep>,
    /// A premise walk hit [`MAX_DEPTH`].
    pub truncated: bool,
    /// `current` in the units of the underlying invariant, if it converts.
    pub reported: Option<String>,
}

impl fmt::Display for Explanation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} = {}", self.knot, self.vertex_id, self.current)?;
        if let Some(r) = &self.reported {
            write!(f, "  [{r}]")?;
        }
        writeln!(f)?;
        if self.steps.is_empty() {
            return writeln!(f, "  ingest bounds only");
        }
        if self.truncated {
            writeln!(f, "  ... (earlier causes omitted)")?;
        }
        for s in &self.steps {
            let e = &s.event;
            write!(
                f,
                "  #{} {} {} {} -> {} ({}",
                s.seq, s.vertex_id, e.side, e.old, e.new, e.cause
            )?;
            if let Some(c) = &s.citation {
                write!(f, ", {c}")?;
            }
            match e.premise {
                Some(p) => writeln!(f, "; from #{p})")?,
                None => writeln!(f, ")")?,
            }
        }
        Ok(())
    }
}

/// The events behind the current bounds of `vertex` for `knot`: for each side
/// the latest event, then its premises back to the ingested values.
pub fn explain(db: &KnotDatabase, g: &InequalityGraph, knot: &str, vertex: &str) -> Result<Explanation, ReportError> {
    let knot_id = KnotId::new(knot).map_err(|_| ReportError::UnknownKnot(knot.to_string()))?;
    let record = db
        .get(&knot_id)
        .ok_or_else(|| ReportError::UnknownKnot(knot.to_string()))?;
    let registry = db.registry();
    let v = registry
        .lookup(vertex)
        .ok_or_else(|| ReportError::UnknownVertex(vertex.to_string()))?;
    let log = &db.provenance;
    let latest = |side: Side| {
        log.iter()
            .rposition(|e| e.knot == knot_id && e.vertex == v && e.side == side)
    };

    let mut seqs = BTreeSet::new();
    let mut truncated = false;
    for side in [Side::Lower, Side::Upper] {
        let mut cur = latest(side);
        let mut depth = 0;
        while let Some(i) = cur {
            if depth == MAX_DEPTH {
                truncated = true;
                break;
            }
            seqs.insert(i);
            cur = log[i].premise;
            depth += 1;
        }
    }
    let derived = seqs
        .iter()
        .any(|&i| log[i].vertex == v && log[i].cause != Cause::Ingest);
    let steps = if derived {
        seqs.into_iter()
            .map(|i| {
                let e = &log[i];
                ExplainStep {
                    seq: i,
                    event: e.clone(),
                    vertex_id: registry.get(e.vertex).id.clone(),
                    citation: match e.cause {
                        Cause::Edge(l) => g.edge(l).map(|edge| edge.citation.clone()),
                        _ => None,
                    },
                }
            })
            .collect()
    } else {
        Vec::new()
    };
    let current = record.get(v);
    let def = registry.get(v);
    Ok(Explanation {
        knot: knot_id,
        vertex: v,
        vertex_id: def.id.clone(),
        current,
        steps,
        truncated: truncated && derived,
        reported: from_vertex(current, def.transform)
            .ok()
            .map(|r| format!("{}: {}", def.base_invariant, r)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{build_database, parse_knotinfo_csv, ColumnMapping};
    use crate::model::{Bound, KnotRecord, Registry};
    use crate::propagate::{propagate, PropagateOptions};

    fn propagated_fixture() -> KnotDatabase {
        let doc = include_str!("../../data/fixture/knotinfo_le9.csv");
        let raw = parse_knotinfo_csv(doc, &ColumnMapping::bundled()).unwrap();
        let db = build_database(&raw, &[], &Registry::standard()).unwrap();
        propagate(&db, &InequalityGraph::bundled(), &PropagateOptions::default())
            .unwrap()
            .db
    }

    #[test]
    fn trefoil_tr_chain() {
        let db = propagated_fixture();
        let g = InequalityGraph::bundled();
        let ex = explain(&db, &g, "3_1", "tr").unwrap();
        assert_eq!(ex.current, Interval::exact(2).unwrap());
        let on_tr: Vec<(Side, Cause, Bound)> = ex
            .steps
            .iter()
            .filter(|s| s.vertex_id == "tr")
            .map(|s| (s.event.side, s.event.cause, s.event.new))
            .collect();
        assert_eq!(
            on_tr,
            vec![
                (Side::Lower, Cause::Edge(10), Bound::Finite(2)),
                (Side::Upper, Cause::Edge(26), Bound::Finite(3)),
                (Side::Upper, Cause::Parity, Bound::Finite(2)),
            ]
        );
        // the edge premises are the ingested 2u and c values
        let roots: Vec<&str> = ex
            .steps
            .iter()
            .filter(|s| s.event.cause == Cause::Ingest)
            .map(|s| s.vertex_id.as_str())
            .collect();
        assert_eq!(roots, ["c", "2u"]);
        let text = ex.to_string();
        assert!(text.starts_with("31 tr = 2:2"));
        assert!(text.contains("edge:26, Han14"));
        assert!(text.contains("edge:10, Hetal11"));
    }

    #[test]
    fn ingest_only() {
        let db = propagated_fixture();
        let g = InequalityGraph::bundled();
        let ex = explain(&db, &g, "3_1", "c").unwrap();
        assert!(ex.steps.is_empty());
        assert!(ex.to_string().contains("ingest bounds only"));
        let ex = explain(&db, &g, "3_1", "2u").unwrap();
        assert!(ex.to_string().contains("unknotting number: 1"), "{ex}");
    }

    #[test]
    fn unknown_names() {
        let db = propagated_fixture();
        let g = InequalityGraph::bundled();
        assert_eq!(
            explain(&db, &g, "99_1", "c"),
            Err(ReportError::UnknownKnot("99_1".into()))
        );
        assert_eq!(
            explain(&db, &g, "3_1", "zz"),
            Err(ReportError::UnknownVertex("zz".into()))
        );
    }

    #[test]
    fn long_chains_are_cut() {
        // a 30-step chain of parity events on one vertex, each citing the last
        let reg = Registry::standard();
        let mut db = KnotDatabase::new(reg.clone());
        let k = KnotId::new("K").unwrap();
        db.push_record(KnotRecord::unknown(k.clone(), reg.len())).unwrap();
        for i in 0..30 {
            db.provenance.push(PropagationEvent {
                knot: k.clone(),
                vertex: VertexIdx(0),
                side: Side::Lower,
                old: Bound::Finite(i),
                new: Bound::Finite(i + 1),
                cause: Cause::Parity,
                premise: i.checked_sub(1).map(|p| p as usize),
            });
        }
        let ex = explain(&db, &InequalityGraph::bundled(), "K", "c").unwrap();
        assert_eq!(ex.steps.len(), MAX_DEPTH);
        assert!(ex.truncated);
        assert!(ex.to_string().contains("earlier causes omitted"));
    }
}
