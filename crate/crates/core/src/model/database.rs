use std::collections::HashMap;
use std::fmt;

use super::interval::{Bound, Interval};
use super::vertex::{Registry, VertexIdx};
use super::ModelError;

/// Canonical knot name: KnotInfo style with subscript markup removed
/// (`13n_{128}` and `13n_128` both become `13n128`).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct KnotId(String);

impl KnotId {
    pub fn new(name: &str) -> Result<Self, ModelError> {
        let id: String = name
            .chars()
            .filter(|c| !matches!(c, '_' | '{' | '}' | '$') && !c.is_whitespace())
            .collect();
        if id.is_empty() {
            return Err(ModelError::Syntax(name.to_string()));
        }
        Ok(KnotId(id))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for KnotId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Intervals for every registered vertex of one knot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KnotRecord {
    pub knot: KnotId,
    pub values: Vec<Interval>,
}

impl KnotRecord {
    pub fn unknown(knot: KnotId, vertices: usize) -> Self {
        KnotRecord {
            knot,
            values: vec![Interval::UNKNOWN; vertices],
        }
    }

    pub fn get(&self, v: VertexIdx) -> Interval {
        self.values[v.0]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Lower,
    Upper,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Lower => "lower",
            Side::Upper => "upper",
        })
    }
}

/// Why a bound moved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Cause {
    Ingest,
    Parity,
    /// Inequality edge with this label.
    Edge(u32),
}

impl fmt::Display for Cause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cause::Ingest => f.write_str("ingest"),
            Cause::Parity => f.write_str("parity"),
            Cause::Edge(l) => write!(f, "edge:{l}"),
        }
    }
}

impl std::str::FromStr for Cause {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ingest" => Ok(Cause::Ingest),
            "parity" => Ok(Cause::Parity),
            _ => s
                .strip_prefix("edge:")
                .and_then(|l| l.parse().ok())
                .map(Cause::Edge)
                .ok_or_else(|| ModelError::Syntax(s.to_string())),
        }
    }
}

/// A single strict tightening of one bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropagationEvent {
    pub knot: KnotId,
    pub vertex: VertexIdx,
    pub side: Side,
    pub old: Bound,
    pub new: Bound,
    pub cause: Cause,
    /// Provenance index of the event that established the bound this one was
    /// derived from (the source endpoint of an edge, or the bound a parity
    /// rounding started from).
    pub premise: Option<usize>,
}

impl PropagationEvent {
    /// Lower events raise, upper events lower.
    pub fn is_tightening(&self) -> bool {
        match self.side {
            Side::Lower => self.new > self.old,
            Side::Upper => self.new < self.old,
        }
    }
}

/// Per-knot intervals for all registered vertices plus the tightening log.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KnotDatabase {
    registry: Registry,
    records: Vec<KnotRecord>,
    index: HashMap<KnotId, usize>,
    pub provenance: Vec<PropagationEvent>,
}

impl KnotDatabase {
    pub fn new(registry: Registry) -> Self {
        KnotDatabase {
            registry,
            records: Vec::new(),
            index: HashMap::new(),
            provenance: Vec::new(),
        }
    }

    pub fn registry(&self) -> &Registry {
        &self.registry
    }

    pub fn records(&self) -> &[KnotRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Appends a knot with every vertex at `[0, +∞)`.
    pub fn push_unknown(&mut self, knot: KnotId) -> Result<usize, ModelError> {
        let record = KnotRecord::unknown(knot, self.registry.len());
        self.push_record(record)
    }

    pub fn push_record(&mut self, record: KnotRecord) -> Result<usize, ModelError> {
        if record.values.len() != self.registry.len() {
            return Err(ModelError::RecordWidth {
                knot: record.knot.to_string(),
                expected: self.registry.len(),
                found: record.values.len(),
            });
        }
        if self.index.contains_key(&record.knot) {
            return Err(ModelError::DuplicateKnot(record.knot.to_string()));
        }
        let i = self.records.len();
        self.index.insert(record.knot.clone(), i);
        self.records.push(record);
        Ok(i)
    }

    pub fn position(&self, knot: &KnotId) -> Option<usize> {
        self.index.get(knot).copied()
    }

    pub fn get(&self, knot: &KnotId) -> Option<&KnotRecord> {
        self.position(knot).map(|i| &self.records[i])
    }

    /// Same knots in the same order with identical intervals; provenance is
    /// not compared.
    pub fn same_values(&self, other: &KnotDatabase) -> bool {
        self.registry == other.registry && self.records == other.records
    }
}
