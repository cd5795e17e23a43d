//! Conjectural inequalities: pairs that hold on every knot of a propagated
//! database without following from the graph.

use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::graph::{transitive_closure, transitive_reduction_modulo, InequalityGraph};
use crate::model::{Interval, KnotDatabase, KnotId, Registry, VertexIdx};
use crate::propagate::{is_fixed_point, PropagateError};

/// Sample knots kept per witness kind.
pub const SAMPLE_LIMIT: usize = 3;

#[derive(Debug, Error)]
pub enum MineError {
    #[error("database is not at the propagation fixed point; run propagate first")]
    NotAFixedPoint,
    #[error("unknown vertex {0:?}")]
    UnknownVertex(String),
    #[error("exclusions line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error(transparent)]
    Propagate(#[from] PropagateError),
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Witnesses {
    pub count: usize,
    /// First few knots in database order.
    pub samples: Vec<KnotId>,
}

impl Witnesses {
    fn add(&mut self, knot: &KnotId) {
        self.count += 1;
        if self.samples.len() < SAMPLE_LIMIT {
            self.samples.push(knot.clone());
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RejectReason {
    /// Already implied by the graph.
    InClosure,
    Excluded,
    /// Some knot certainly has `greater < lesser`.
    Violated,
    NoEquality,
    NoStrict,
}

impl RejectReason {
    pub fn as_str(self) -> &'static str {
        match self {
            RejectReason::InClosure => "in_closure",
            RejectReason::Excluded => "excluded",
            RejectReason::Violated => "violated",
            RejectReason::NoEquality => "no_equality",
            RejectReason::NoStrict => "no_strict",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    Candidate,
    Rejected(RejectReason),
    Conj,
    BasicConj,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Status::Candidate => f.write_str("candidate"),
            Status::Rejected(r) => write!(f, "rejected:{}", r.as_str()),
            Status::Conj => f.write_str("conj"),
            Status::BasicConj => f.write_str("basic_conj"),
        }
    }
}

/// `greater >= lesser` with its tallies over the database.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Conjecture {
    pub greater: VertexIdx,
    pub lesser: VertexIdx,
    pub violations: Witnesses,
    pub equality: Witnesses,
    pub strict: Witnesses,
    pub undetermined: usize,
    pub status: Status,
}

/// Unordered vertex pairs known to be incomparable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExclusionList {
    pub pairs: Vec<(String, String)>,
}

impl Default for ExclusionList {
    fn default() -> Self {
        ExclusionList {
            pairs: [
                ("2g", "degPz"),
                ("degPz", "2cl"),
                ("2gc", "2cl"),
                ("2gf", "2cl"),
                ("2br-2", "2cl"),
            ]
            .iter()
            .map(|&(a, b)| (a.to_string(), b.to_string()))
            .collect(),
        }
    }
}

impl ExclusionList {
    pub fn empty() -> Self {
        ExclusionList { pairs: Vec::new() }
    }

    /// One `a<TAB>b` pair per line, `#` comments.
    pub fn parse(text: &str) -> Result<Self, MineError> {
        let mut pairs = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            match line.split('\t').map(str::trim).collect::<Vec<_>>().as_slice() {
                [a, b] => pairs.push((a.to_string(), b.to_string())),
                _ => {
                    return Err(MineError::Syntax {
                        line: n + 1,
                        message: "expected `a<TAB>b`".into(),
                    })
                }
            }
        }
        Ok(ExclusionList { pairs })
    }

    pub fn contains(&self, a: &str, b: &str) -> bool {
        self.pairs.iter().any(|(x, y)| (x == a && y == b) || (x == b && y == a))
    }

    fn resolve(&self, registry: &Registry) -> Result<Vec<(VertexIdx, VertexIdx)>, MineError> {
        let look = |id: &str| {
            registry
                .lookup(id)
                .ok_or_else(|| MineError::UnknownVertex(id.to_string()))
        };
        self.pairs.iter().map(|(a, b)| Ok((look(a)?, look(b)?))).collect()
    }
}

#[derive(Debug, Clone, Default)]
pub struct MineOptions {
    /// Only knots where both cells are exact take part in the scan.
    pub exact_only: bool,
    /// Worker threads; 0 lets rayon decide.
    pub jobs: usize,
}

/// How one knot bears on `greater >= lesser`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Violation,
    Equality,
    Strict,
    Undetermined,
}

/// Certified classification: only bounds that prove a relation count.
pub fn classify(greater: Interval, lesser: Interval) -> Verdict {
    use crate::model::Bound::Finite;
    if greater.hi() < Finite(lesser.lo()) {
        Verdict::Violation
    } else if greater.is_exact() && lesser.is_exact() && greater == lesser {
        Verdict::Equality
    } else if lesser.hi() < Finite(greater.lo()) {
        Verdict::Strict
    } else {
        Verdict::Undetermined
    }
}

fn graph_to_registry(g: &InequalityGraph, registry: &Registry) -> Result<Vec<VertexIdx>, MineError> {
    g.vertices()
        .iter()
        .map(|id| {
            registry
                .lookup(id)
                .ok_or_else(|| MineError::Propagate(PropagateError::UnregisteredVertex(id.clone())))
        })
        .collect()
}

fn scan(db: &KnotDatabase, x: VertexIdx, y: VertexIdx, exact_only: bool) -> Conjecture {
    let mut c = Conjecture {
        greater: x,
        lesser: y,
        violations: Witnesses::default(),
        equality: Witnesses::default(),
        strict: Witnesses::default(),
        undetermined: 0,
        status: Status::Candidate,
    };
    for r in db.records() {
        let (a, b) = (r.get(x), r.get(y));
        if exact_only && !(a.is_exact() && b.is_exact()) {
            continue;
        }
        match classify(a, b) {
            Verdict::Violation => c.violations.add(&r.knot),
            Verdict::Equality => c.equality.add(&r.knot),
            Verdict::Strict => c.strict.add(&r.knot),
            Verdict::Undetermined => c.undetermined += 1,
        }
    }
    c
}

/// Scans every ordered pair of distinct graph vertices and assigns a status:
/// `Conj` or the first failed condition. Pairs come out in graph vertex order.
pub fn scan_pairs(
    db: &KnotDatabase,
    g: &InequalityGraph,
    excl: &ExclusionList,
    opts: &MineOptions,
) -> Result<Vec<Conjecture>, MineError> {
    if !is_fixed_point(db, g)? {
        return Err(MineError::NotAFixedPoint);
    }
    let registry = db.registry();
    let to_reg = graph_to_registry(g, registry)?;
    let excluded = excl.resolve(registry)?;
    let closure = transitive_closure(g);
    let n = to_reg.len();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (0..n).filter(move |&b| b != a).map(move |b| (a, b)))
        .collect();
    let work = |&(a, b): &(usize, usize)| {
        let (x, y) = (to_reg[a], to_reg[b]);
        let mut c = scan(db, x, y, opts.exact_only);
        c.status = if closure.contains(a, b) {
            Status::Rejected(RejectReason::InClosure)
        } else if excluded.iter().any(|&p| p == (x, y) || p == (y, x)) {
            Status::Rejected(RejectReason::Excluded)
        } else if c.violations.count > 0 {
            Status::Rejected(RejectReason::Violated)
        } else if c.equality.count == 0 {
            Status::Rejected(RejectReason::NoEquality)
        } else if c.strict.count == 0 {
            Status::Rejected(RejectReason::NoStrict)
        } else {
            Status::Conj
        };
        c
    };
    if opts.jobs == 1 {
        return Ok(pairs.iter().map(work).collect());
    }
    let run = || pairs.par_iter().map(work).collect();
    if opts.jobs == 0 {
        return Ok(run());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs)
        .build()
        .map_err(|e| PropagateError::ThreadPool(e.to_string()))?;
    Ok(pool.install(run))
}

/// The pairs of [`scan_pairs`] with status `Conj`.
pub fn enumerate_conjectures(
    db: &KnotDatabase,
    g: &InequalityGraph,
    excl: &ExclusionList,
    opts: &MineOptions,
) -> Result<Vec<Conjecture>, MineError> {
    let mut all = scan_pairs(db, g, excl, opts)?;
    all.retain(|c| c.status == Status::Conj);
    Ok(all)
}

/// Smallest subset of `conj` that generates all of it together with the
/// graph, tagged `BasicConj`.
///
/// Candidates are tried for removal in order of `(greater id, lesser id)`;
/// the result keeps that order.
pub fn basic_conjectures(
    g: &InequalityGraph,
    conj: &[Conjecture],
    registry: &Registry,
) -> Result<Vec<Conjecture>, MineError> {
    let graph_index = |v: VertexIdx| {
        let id = &registry.get(v).id;
        g.vertex_index(id).ok_or_else(|| MineError::UnknownVertex(id.clone()))
    };
    let mut sorted: Vec<&Conjecture> = conj.iter().collect();
    sorted.sort_by(|a, b| {
        let key = |c: &Conjecture| (registry.get(c.greater).id.clone(), registry.get(c.lesser).id.clone());
        key(a).cmp(&key(b))
    });
    let pairs = sorted
        .iter()
        .map(|c| Ok((graph_index(c.greater)?, graph_index(c.lesser)?)))
        .collect::<Result<Vec<_>, MineError>>()?;
    let kept = transitive_reduction_modulo(&transitive_closure(g), &pairs);
    Ok(sorted
        .into_iter()
        .zip(&pairs)
        .filter(|(_, p)| kept.contains(p))
        .map(|(c, _)| Conjecture {
            status: Status::BasicConj,
            ..c.clone()
        })
        .collect())
}

/// `greater,lesser,status,equality_witnesses,strict_witnesses,undetermined,sample_equality_knot,sample_strict_knot`.
pub fn write_conjectures_csv(conj: &[Conjecture], registry: &Registry) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "greater",
        "lesser",
        "status",
        "equality_witnesses",
        "strict_witnesses",
        "undetermined",
        "sample_equality_knot",
        "sample_strict_knot",
    ])
    .expect("in-memory write");
    let first = |w: &Witnesses| w.samples.first().map(KnotId::to_string).unwrap_or_default();
    for c in conj {
        w.write_record([
            registry.get(c.greater).id.clone(),
            registry.get(c.lesser).id.clone(),
            c.status.to_string(),
            c.equality.count.to_string(),
            c.strict.count.to_string(),
            c.undetermined.to_string(),
            first(&c.equality),
            first(&c.strict),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf-8 fields")
}

#[cfg(test)]
mod tests;
