//! Quantities, integer intervals, parity classes and the knot database.

mod database;
mod interval;
mod vertex;

pub use database::{Cause, KnotDatabase, KnotId, KnotRecord, PropagationEvent, Side};
pub use interval::{meet, Bound, Interval, RawInterval};
pub use vertex::{
    apply_parity, from_vertex, to_vertex, Parity, ParityTable, Registry, Reported, SourceClass, Transform, VertexDef,
    VertexIdx,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("contradiction: {a} and {b} do not intersect")]
    Contradiction { a: Interval, b: Interval },
    #[error("parity contradiction: {0} contains no even value")]
    ParityContradiction(Interval),
    #[error("empty interval [{lo}, {hi}]")]
    Empty { lo: i64, hi: Bound },
    #[error("negative lower bound {0}")]
    NegativeBound(i64),
    #[error("integer overflow while transforming a value")]
    Overflow,
    #[error("{value} is not of the form {scale}*x + ({offset}) for an integer x")]
    NonIntegral { value: i64, scale: i64, offset: i64 },
    #[error("cannot parse {0:?}")]
    Syntax(String),
    #[error("unknown vertex {0:?}")]
    UnknownVertex(String),
    #[error("duplicate vertex {0:?}")]
    DuplicateVertex(String),
    #[error("duplicate knot {0:?}")]
    DuplicateKnot(String),
    #[error("record for {knot} has {found} values, registry has {expected}")]
    RecordWidth {
        knot: String,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: malformed table row {text:?}")]
    TableLine { line: usize, text: String },
}
