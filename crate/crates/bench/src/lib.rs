//! Inputs shared by the criterion benches.

use knotineq_core::ingest::{build_database, parse_knotinfo_csv};
use knotineq_core::propagate::propagate;
use knotineq_core::{ColumnMapping, InequalityGraph, KnotDatabase, PropagateOptions, Registry, SupplementTable};

const FIXTURE: &str = include_str!("../../core/data/fixture/knotinfo_le9.csv");
const SUPPLEMENT: &str = include_str!("../../core/data/fixture/supplement_le9.csv");

/// The bundled fixture with its supplement, as ingested.
pub fn fixture() -> KnotDatabase {
    let reg = Registry::standard();
    let raw = parse_knotinfo_csv(FIXTURE, &ColumnMapping::bundled()).expect("fixture parses");
    let supp = SupplementTable::parse(SUPPLEMENT, &reg).expect("supplement parses");
    build_database(&raw, &[supp], &reg).expect("fixture builds")
}

/// `fixture()` at its fixed point.
pub fn propagated_fixture() -> KnotDatabase {
    propagate(&fixture(), &InequalityGraph::bundled(), &PropagateOptions::default())
        .expect("fixture propagates")
        .db
}

/// `copies` renamed copies of `db`, for throughput runs.
pub fn replicate(db: &KnotDatabase, copies: usize) -> KnotDatabase {
    let mut out = KnotDatabase::new(db.registry().clone());
    for i in 0..copies {
        for r in db.records() {
            let mut r = r.clone();
            r.knot = knotineq_core::KnotId::new(&format!("{}.copy{i}", r.knot)).expect("non-empty name");
            out.push_record(r).expect("names are unique");
        }
    }
    out
}
