//! KnotInfo exports and supplemental value files into a [`KnotDatabase`].

mod export;
mod knotinfo;
mod supplement;

pub use export::{read_database_csv, read_events_csv, write_database_csv, write_events_csv};
pub use knotinfo::{
    parse_cell, parse_knotinfo_csv, ColumnMapping, InvalidCell, MappedColumn, RawRow, RawTable, ValueSyntax,
};
pub use supplement::{SupplementRow, SupplementTable};

use std::collections::HashMap;

use thiserror::Error;

use crate::model::{
    apply_parity, meet, to_vertex, Bound, Cause, Interval, KnotDatabase, KnotId, KnotRecord, ModelError,
    PropagationEvent, Registry, Side, VertexIdx,
};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("row {row}, column {column:?}: cannot parse {text:?}")]
    MalformedCell { row: usize, column: String, text: String },
    #[error("missing column {0:?}")]
    UnknownColumn(String),
    #[error("duplicate knot {0}")]
    DuplicateKnot(String),
    #[error("unknown knot {0}")]
    UnknownKnot(String),
    #[error("unknown vertex {0:?}")]
    UnknownVertex(String),
    #[error("mapping line {line}: {message}")]
    Mapping { line: usize, message: String },
    #[error("vertex {0:?} is mapped twice")]
    DuplicateMapping(String),
    #[error("KnotInfo vertex {0:?} has no column mapping")]
    MissingMapping(String),
    #[error("supplement row {row}: {vertex:?} is KnotInfo-sourced; mark the row `override`")]
    SupplementClass { row: usize, vertex: String },
    #[error("{knot}, {vertex}: {detail}")]
    Contradiction {
        knot: String,
        vertex: String,
        detail: String,
    },
    #[error("{knot}, {vertex}: {source}")]
    Value {
        knot: String,
        vertex: String,
        source: ModelError,
    },
    #[error("events row {row}: {message}")]
    Event { row: usize, message: String },
}

struct Builder<'a> {
    registry: &'a Registry,
    record: KnotRecord,
    events: &'a mut Vec<PropagationEvent>,
    /// Latest event per (vertex, side).
    last: Vec<[Option<usize>; 2]>,
}

impl Builder<'_> {
    fn id(&self, v: VertexIdx) -> String {
        self.registry.get(v).id.clone()
    }

    fn install(&mut self, v: VertexIdx, new: Interval, cause: Cause) {
        let old = self.record.values[v.0];
        let sides = [
            (Side::Lower, Bound::Finite(old.lo()), Bound::Finite(new.lo())),
            (Side::Upper, old.hi(), new.hi()),
        ];
        for (k, (side, before, after)) in sides.into_iter().enumerate() {
            if before != after {
                let premise = match cause {
                    Cause::Ingest => None,
                    _ => self.last[v.0][k],
                };
                self.last[v.0][k] = Some(self.events.len());
                self.events.push(PropagationEvent {
                    knot: self.record.knot.clone(),
                    vertex: v,
                    side,
                    old: before,
                    new: after,
                    cause,
                    premise,
                });
            }
        }
        self.record.values[v.0] = new;
    }

    fn narrow(&mut self, v: VertexIdx, incoming: Interval, what: &str) -> Result<(), IngestError> {
        let current = self.record.values[v.0];
        let new = meet(current, incoming).map_err(|_| IngestError::Contradiction {
            knot: self.record.knot.to_string(),
            vertex: self.id(v),
            detail: format!("{what} {incoming} conflicts with ingested {current}"),
        })?;
        self.install(v, new, Cause::Ingest);
        Ok(())
    }
}

/// Builds the database: KnotInfo values through the vertex transforms, then
/// supplements (in table order), then one parity pass.
///
/// Knots appear in raw-table order. Every bound change is logged; supplement
/// rows are met with existing bounds, never replace them.
pub fn build_database(
    raw: &RawTable,
    supplements: &[SupplementTable],
    registry: &Registry,
) -> Result<KnotDatabase, IngestError> {
    let mut db = KnotDatabase::new(registry.clone());
    let position: HashMap<&KnotId, usize> = raw.rows.iter().enumerate().map(|(i, r)| (&r.knot, i)).collect();
    let mut extra: Vec<Vec<(VertexIdx, Interval)>> = vec![Vec::new(); raw.rows.len()];
    for row in supplements.iter().flat_map(|t| &t.rows) {
        let &i = position
            .get(&row.knot)
            .ok_or_else(|| IngestError::UnknownKnot(row.knot.to_string()))?;
        extra[i].push((row.vertex, row.value));
    }

    let mut events = Vec::new();
    for (row, extra) in raw.rows.iter().zip(extra) {
        let mut b = Builder {
            registry,
            record: KnotRecord::unknown(row.knot.clone(), registry.len()),
            events: &mut events,
            last: vec![[None; 2]; registry.len()],
        };
        for (id, value) in &row.values {
            let v = registry
                .lookup(id)
                .ok_or_else(|| IngestError::UnknownVertex(id.clone()))?;
            let iv = to_vertex(*value, registry.get(v).transform).map_err(|source| IngestError::Value {
                knot: row.knot.to_string(),
                vertex: id.clone(),
                source,
            })?;
            b.narrow(v, iv, "KnotInfo value")?;
        }
        for (v, iv) in extra {
            b.narrow(v, iv, "supplement")?;
        }
        for v in registry.indices() {
            let current = b.record.values[v.0];
            let rounded = apply_parity(current, registry.parity(v)).map_err(|_| IngestError::Contradiction {
                knot: row.knot.to_string(),
                vertex: b.id(v),
                detail: format!("{current} contains no even value"),
            })?;
            b.install(v, rounded, Cause::Parity);
        }
        let record = b.record;
        db.push_record(record)
            .map_err(|_| IngestError::DuplicateKnot(row.knot.to_string()))?;
    }
    db.provenance = events;
    Ok(db)
}
