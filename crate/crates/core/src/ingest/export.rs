use crate::model::{
    Bound, Cause, Interval, KnotDatabase, KnotId, KnotRecord, PropagationEvent, Registry, Side, VertexIdx,
};

use super::IngestError;

fn finish(w: csv::Writer<Vec<u8>>) -> String {
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf-8 fields")
}

/// `knot,<vertex ids…>` with `lo:hi` cells, knots in database order.
pub fn write_database_csv(db: &KnotDatabase) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let header = std::iter::once("knot").chain(db.registry().defs().iter().map(|d| d.id.as_str()));
    w.write_record(header).expect("in-memory write");
    for r in db.records() {
        let cells = std::iter::once(r.knot.to_string()).chain(r.values.iter().map(Interval::to_string));
        w.write_record(cells).expect("in-memory write");
    }
    finish(w)
}

/// Inverse of [`write_database_csv`]; columns may come in any order but must
/// cover the registry exactly. Provenance is left empty.
pub fn read_database_csv(document: &str, registry: &Registry) -> Result<KnotDatabase, IngestError> {
    let mut reader = csv::Reader::from_reader(document.as_bytes());
    let headers = reader.headers()?.clone();
    if headers.get(0) != Some("knot") {
        return Err(IngestError::UnknownColumn("knot".into()));
    }
    let mut columns = Vec::new();
    for h in headers.iter().skip(1) {
        columns.push(
            registry
                .lookup(h)
                .ok_or_else(|| IngestError::UnknownVertex(h.to_string()))?,
        );
    }
    for v in registry.indices() {
        match columns.iter().filter(|&&c| c == v).count() {
            0 => return Err(IngestError::UnknownColumn(registry.get(v).id.clone())),
            1 => {}
            _ => return Err(IngestError::DuplicateMapping(registry.get(v).id.clone())),
        }
    }
    let mut db = KnotDatabase::new(registry.clone());
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let row = i + 2;
        let malformed = |k: usize| IngestError::MalformedCell {
            row,
            column: headers.get(k).unwrap_or("").to_string(),
            text: record.get(k).unwrap_or("").to_string(),
        };
        let knot = KnotId::new(&record[0]).map_err(|_| malformed(0))?;
        let mut values = vec![Interval::UNKNOWN; registry.len()];
        for (k, v) in columns.iter().enumerate() {
            values[v.0] = record
                .get(k + 1)
                .ok_or_else(|| malformed(k + 1))?
                .parse()
                .map_err(|_| malformed(k + 1))?;
        }
        db.push_record(KnotRecord {
            knot: knot.clone(),
            values,
        })
        .map_err(|_| IngestError::DuplicateKnot(knot.to_string()))?;
    }
    Ok(db)
}

/// `seq,knot,vertex,side,old,new,cause,premise`; `premise` is blank when absent.
pub fn write_events_csv(db: &KnotDatabase) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["seq", "knot", "vertex", "side", "old", "new", "cause", "premise"])
        .expect("in-memory write");
    for (i, e) in db.provenance.iter().enumerate() {
        w.write_record([
            i.to_string(),
            e.knot.to_string(),
            db.registry().get(e.vertex).id.clone(),
            e.side.to_string(),
            e.old.to_string(),
            e.new.to_string(),
            e.cause.to_string(),
            e.premise.map(|p| p.to_string()).unwrap_or_default(),
        ])
        .expect("in-memory write");
    }
    finish(w)
}

/// Reads an event log written by [`write_events_csv`], checking that every
/// knot and vertex exists in `db` and that premises point backwards.
pub fn read_events_csv(document: &str, db: &KnotDatabase) -> Result<Vec<PropagationEvent>, IngestError> {
    let mut reader = csv::Reader::from_reader(document.as_bytes());
    let mut events = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let bad = |message: String| IngestError::Event { row: i + 2, message };
        if record.len() != 8 {
            return Err(bad(format!("expected 8 fields, found {}", record.len())));
        }
        if record[0].parse::<usize>().ok() != Some(i) {
            return Err(bad(format!("sequence number {:?} out of order", &record[0])));
        }
        let knot = KnotId::new(&record[1]).map_err(|e| bad(e.to_string()))?;
        if db.position(&knot).is_none() {
            return Err(IngestError::UnknownKnot(knot.to_string()));
        }
        let vertex: VertexIdx = db
            .registry()
            .lookup(&record[2])
            .ok_or_else(|| IngestError::UnknownVertex(record[2].to_string()))?;
        let side = match &record[3] {
            "lower" => Side::Lower,
            "upper" => Side::Upper,
            s => return Err(bad(format!("side {s:?}"))),
        };
        let old: Bound = record[4]
            .parse()
            .map_err(|e: crate::model::ModelError| bad(e.to_string()))?;
        let new: Bound = record[5]
            .parse()
            .map_err(|e: crate::model::ModelError| bad(e.to_string()))?;
        let cause: Cause = record[6]
            .parse()
            .map_err(|e: crate::model::ModelError| bad(e.to_string()))?;
        let premise = match &record[7] {
            "" => None,
            p => match p.parse::<usize>() {
                Ok(p) if p < i => Some(p),
                _ => return Err(bad(format!("premise {p:?}"))),
            },
        };
        events.push(PropagationEvent {
            knot,
            vertex,
            side,
            old,
            new,
            cause,
            premise,
        });
    }
    Ok(events)
}
