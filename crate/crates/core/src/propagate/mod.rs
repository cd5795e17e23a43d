//! Bound propagation over the inequality graph, and before/after diffs.

mod diff;

pub use diff::{diff, write_diff_csv, Diff, DiffCategory, DiffRow, DiffSummary};

use std::collections::{HashSet, VecDeque};
use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::graph::InequalityGraph;
use crate::model::{
    Bound, Cause, Interval, KnotDatabase, KnotId, KnotRecord, Parity, PropagationEvent, Registry, Side, VertexIdx,
};

#[derive(Debug, Error)]
pub enum PropagateError {
    #[error("graph vertex {0:?} is not in the registry")]
    UnregisteredVertex(String),
    #[error("edge order must be a permutation of the graph labels: {0}")]
    EdgeOrder(String),
    #[error("{0}")]
    Contradiction(ContradictionReport),
    #[error("databases differ: {0}")]
    MismatchedDatabases(String),
    #[error("thread pool: {0}")]
    ThreadPool(String),
}

#[derive(Debug, Clone, Default)]
pub struct PropagateOptions {
    /// Abort on the first contradicting knot instead of skipping it.
    pub strict: bool,
    /// Worker threads; 0 lets rayon decide.
    pub jobs: usize,
    /// Edge labels in the order the worklist is seeded; default is label order.
    pub edge_order: Option<Vec<u32>>,
}

/// A knot whose bounds became empty. The knot is left as it was before
/// propagation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContradictionReport {
    pub knot: KnotId,
    pub vertex: VertexIdx,
    pub vertex_id: String,
    pub detail: String,
    /// Events behind the two clashing bounds, root first; premise links are
    /// dropped because some of these events were never committed.
    pub chain: Vec<PropagationEvent>,
}

impl fmt::Display for ContradictionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "contradiction in {} at {}: {}",
            self.knot, self.vertex_id, self.detail
        )
    }
}

#[derive(Debug, Clone)]
pub struct Propagation {
    pub db: KnotDatabase,
    pub contradictions: Vec<ContradictionReport>,
    /// Edge applications performed, summed over knots.
    pub steps: usize,
}

struct Ctx {
    /// (greater, lesser, label)
    edges: Vec<(usize, usize, u32)>,
    order: Vec<usize>,
    incident: Vec<Vec<usize>>,
    parity: Vec<Parity>,
}

impl Ctx {
    fn new(registry: &Registry, g: &InequalityGraph, edge_order: Option<&[u32]>) -> Result<Self, PropagateError> {
        let reg = |id: &str| {
            registry
                .lookup(id)
                .map(|v| v.0)
                .ok_or_else(|| PropagateError::UnregisteredVertex(id.to_string()))
        };
        let edges = g
            .edges()
            .iter()
            .map(|e| Ok((reg(&e.greater)?, reg(&e.lesser)?, e.label)))
            .collect::<Result<Vec<_>, PropagateError>>()?;
        let order = match edge_order {
            None => (0..edges.len()).collect(),
            Some(labels) => {
                let mut seen = HashSet::new();
                let order = labels
                    .iter()
                    .map(|&l| {
                        let i = edges.iter().position(|e| e.2 == l);
                        match i {
                            Some(i) if seen.insert(l) => Ok(i),
                            Some(_) => Err(PropagateError::EdgeOrder(format!("label {l} repeated"))),
                            None => Err(PropagateError::EdgeOrder(format!("no edge {l}"))),
                        }
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                if order.len() != edges.len() {
                    return Err(PropagateError::EdgeOrder(format!(
                        "{} labels given, graph has {}",
                        order.len(),
                        edges.len()
                    )));
                }
                order
            }
        };
        let mut incident = vec![Vec::new(); registry.len()];
        for (i, &(x, y, _)) in edges.iter().enumerate() {
            incident[x].push(i);
            incident[y].push(i);
        }
        let parity = registry.indices().map(|v| registry.parity(v)).collect();
        Ok(Ctx {
            edges,
            order,
            incident,
            parity,
        })
    }
}

fn round_up(v: i64, p: Parity) -> i64 {
    match p {
        Parity::Even if v % 2 != 0 => v + 1,
        _ => v,
    }
}

fn round_down(b: Bound, p: Parity) -> Bound {
    match (p, b) {
        (Parity::Even, Bound::Finite(h)) => Bound::Finite(h - h.rem_euclid(2)),
        _ => b,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Ref {
    Global(usize),
    Local(usize),
}

struct Conflict {
    vertex: usize,
    detail: String,
    /// Heads of the two clashing premise chains.
    heads: [Option<Ref>; 2],
    /// The bound that could not be installed.
    attempted: PropagationEvent,
}

struct Run<'a> {
    ctx: &'a Ctx,
    knot: &'a KnotId,
    lo: Vec<i64>,
    hi: Vec<Bound>,
    last: Vec<[Option<Ref>; 2]>,
    events: Vec<PropagationEvent>,
    premises: Vec<Option<Ref>>,
    steps: usize,
}

fn slot(side: Side) -> usize {
    match side {
        Side::Lower => 0,
        Side::Upper => 1,
    }
}

impl<'a> Run<'a> {
    fn new(ctx: &'a Ctx, record: &'a KnotRecord, history: &[usize], log: &[PropagationEvent]) -> Self {
        let mut last = vec![[None; 2]; record.values.len()];
        for &i in history {
            last[log[i].vertex.0][slot(log[i].side)] = Some(Ref::Global(i));
        }
        Run {
            ctx,
            knot: &record.knot,
            lo: record.values.iter().map(Interval::lo).collect(),
            hi: record.values.iter().map(Interval::hi).collect(),
            last,
            events: Vec::new(),
            premises: Vec::new(),
            steps: 0,
        }
    }

    fn event(&self, v: usize, side: Side, old: Bound, new: Bound, cause: Cause) -> PropagationEvent {
        PropagationEvent {
            knot: self.knot.clone(),
            vertex: VertexIdx(v),
            side,
            old,
            new,
            cause,
            premise: None,
        }
    }

    fn log(&mut self, e: PropagationEvent, premise: Option<Ref>) -> Ref {
        let r = Ref::Local(self.events.len());
        self.last[e.vertex.0][slot(e.side)] = Some(r);
        self.events.push(e);
        self.premises.push(premise);
        r
    }

    fn conflict(&self, attempted: PropagationEvent, premise: Option<Ref>) -> Box<Conflict> {
        let v = attempted.vertex.0;
        let (detail, other) = match attempted.side {
            Side::Lower => (
                format!(
                    "lower bound {} ({}) exceeds upper bound {}",
                    attempted.new, attempted.cause, self.hi[v]
                ),
                self.last[v][1],
            ),
            Side::Upper => (
                format!(
                    "upper bound {} ({}) is below lower bound {}",
                    attempted.new, attempted.cause, self.lo[v]
                ),
                self.last[v][0],
            ),
        };
        Box::new(Conflict {
            vertex: v,
            detail,
            heads: [premise, other],
            attempted,
        })
    }

    /// Raises `lo(v)` to `to`, then rounds for parity. Returns whether it moved.
    fn raise(&mut self, v: usize, to: i64, cause: Cause, premise: Option<Ref>) -> Result<bool, Box<Conflict>> {
        if to <= self.lo[v] {
            return Ok(false);
        }
        let e = self.event(v, Side::Lower, Bound::Finite(self.lo[v]), Bound::Finite(to), cause);
        if self.hi[v] < Bound::Finite(to) {
            return Err(self.conflict(e, premise));
        }
        let r = self.log(e, premise);
        self.lo[v] = to;
        self.round_lower(v, Some(r))?;
        Ok(true)
    }

    fn round_lower(&mut self, v: usize, premise: Option<Ref>) -> Result<(), Box<Conflict>> {
        let p = round_up(self.lo[v], self.ctx.parity[v]);
        if p != self.lo[v] {
            let e = self.event(
                v,
                Side::Lower,
                Bound::Finite(self.lo[v]),
                Bound::Finite(p),
                Cause::Parity,
            );
            if self.hi[v] < Bound::Finite(p) {
                return Err(self.conflict(e, premise));
            }
            self.log(e, premise);
            self.lo[v] = p;
        }
        Ok(())
    }

    fn lower(&mut self, v: usize, to: Bound, cause: Cause, premise: Option<Ref>) -> Result<bool, Box<Conflict>> {
        if to >= self.hi[v] {
            return Ok(false);
        }
        let e = self.event(v, Side::Upper, self.hi[v], to, cause);
        if to < Bound::Finite(self.lo[v]) {
            return Err(self.conflict(e, premise));
        }
        let r = self.log(e, premise);
        self.hi[v] = to;
        self.round_upper(v, Some(r))?;
        Ok(true)
    }

    fn round_upper(&mut self, v: usize, premise: Option<Ref>) -> Result<(), Box<Conflict>> {
        let p = round_down(self.hi[v], self.ctx.parity[v]);
        if p != self.hi[v] {
            let e = self.event(v, Side::Upper, self.hi[v], p, Cause::Parity);
            if p < Bound::Finite(self.lo[v]) {
                return Err(self.conflict(e, premise));
            }
            self.log(e, premise);
            self.hi[v] = p;
        }
        Ok(())
    }

    fn run(&mut self) -> Result<(), Box<Conflict>> {
        for v in 0..self.lo.len() {
            self.round_lower(v, self.last[v][0])?;
            self.round_upper(v, self.last[v][1])?;
        }
        let ctx = self.ctx;
        let mut queued = vec![true; ctx.edges.len()];
        let mut queue: VecDeque<usize> = ctx.order.iter().copied().collect();
        while let Some(e) = queue.pop_front() {
            queued[e] = false;
            self.steps += 1;
            let (x, y, label) = ctx.edges[e];
            let mut changed = Vec::with_capacity(2);
            if self.raise(x, self.lo[y], Cause::Edge(label), self.last[y][0])? {
                changed.push(x);
            }
            if self.lower(y, self.hi[x], Cause::Edge(label), self.last[x][1])? {
                changed.push(y);
            }
            for v in changed {
                for &f in &ctx.incident[v] {
                    if f != e && !queued[f] {
                        queued[f] = true;
                        queue.push_back(f);
                    }
                }
            }
        }
        Ok(())
    }

    fn resolve<'b>(&'b self, r: Ref, log: &'b [PropagationEvent]) -> (&'b PropagationEvent, Option<Ref>) {
        match r {
            Ref::Local(i) => (&self.events[i], self.premises[i]),
            Ref::Global(i) => (&log[i], log[i].premise.map(Ref::Global)),
        }
    }

    fn report(&self, c: Conflict, log: &[PropagationEvent], registry: &Registry) -> ContradictionReport {
        let mut chain = Vec::new();
        for head in c.heads {
            let mut side = Vec::new();
            let mut cur = head;
            while let Some(r) = cur {
                let (e, next) = self.resolve(r, log);
                side.push(PropagationEvent {
                    premise: None,
                    ..e.clone()
                });
                cur = next;
            }
            side.reverse();
            chain.extend(side);
        }
        chain.push(c.attempted);
        ContradictionReport {
            knot: self.knot.clone(),
            vertex: VertexIdx(c.vertex),
            vertex_id: registry.get(VertexIdx(c.vertex)).id.clone(),
            detail: c.detail,
            chain,
        }
    }
}

enum KnotResult {
    Done {
        values: Vec<Interval>,
        events: Vec<PropagationEvent>,
        premises: Vec<Option<Ref>>,
        steps: usize,
    },
    Failed(ContradictionReport),
}

fn history(db: &KnotDatabase) -> Vec<Vec<usize>> {
    let mut h = vec![Vec::new(); db.len()];
    for (i, e) in db.provenance.iter().enumerate() {
        if let Some(k) = db.position(&e.knot) {
            h[k].push(i);
        }
    }
    h
}

fn with_pool<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> Result<T, PropagateError> {
    if jobs == 0 {
        return Ok(f());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| PropagateError::ThreadPool(e.to_string()))?;
    Ok(pool.install(f))
}

/// Propagates every knot to the fixed point of the edge rules
/// `lo(X) >= lo(Y)`, `hi(Y) <= hi(X)` and parity rounding.
///
/// Knots run independently (in parallel when `jobs != 1`); new events are
/// appended to the existing log in knot order, so output does not depend on
/// scheduling.
pub fn propagate(
    db: &KnotDatabase,
    g: &InequalityGraph,
    opts: &PropagateOptions,
) -> Result<Propagation, PropagateError> {
    let registry = db.registry();
    let ctx = Ctx::new(registry, g, opts.edge_order.as_deref())?;
    let history = history(db);
    let log = &db.provenance;
    let work = |(record, hist): (&KnotRecord, &Vec<usize>)| {
        let mut run = Run::new(&ctx, record, hist, log);
        match run.run() {
            Ok(()) => KnotResult::Done {
                values: run
                    .lo
                    .iter()
                    .zip(&run.hi)
                    .map(|(&lo, &hi)| Interval::new(lo, hi).expect("propagation keeps intervals nonempty"))
                    .collect(),
                events: run.events,
                premises: run.premises,
                steps: run.steps,
            },
            Err(c) => KnotResult::Failed(run.report(*c, log, registry)),
        }
    };
    let results: Vec<KnotResult> = if opts.jobs == 1 {
        db.records().iter().zip(&history).map(work).collect()
    } else {
        with_pool(opts.jobs, || db.records().par_iter().zip(&history).map(work).collect())?
    };

    let mut out = KnotDatabase::new(registry.clone());
    out.provenance = db.provenance.clone();
    let mut contradictions = Vec::new();
    let mut steps = 0;
    for (record, result) in db.records().iter().zip(results) {
        match result {
            KnotResult::Done {
                values,
                events,
                premises,
                steps: s,
            } => {
                steps += s;
                let base = out.provenance.len();
                for (mut e, p) in events.into_iter().zip(premises) {
                    e.premise = p.map(|r| match r {
                        Ref::Global(i) => i,
                        Ref::Local(i) => base + i,
                    });
                    out.provenance.push(e);
                }
                out.push_record(KnotRecord {
                    knot: record.knot.clone(),
                    values,
                })
                .expect("knots are unique in the input");
            }
            KnotResult::Failed(report) => {
                if opts.strict {
                    return Err(PropagateError::Contradiction(report));
                }
                contradictions.push(report);
                out.push_record(record.clone()).expect("knots are unique in the input");
            }
        }
    }
    Ok(Propagation {
        db: out,
        contradictions,
        steps,
    })
}

/// Whether no edge or parity rule can tighten any interval of `db`.
pub fn is_fixed_point(db: &KnotDatabase, g: &InequalityGraph) -> Result<bool, PropagateError> {
    let ctx = Ctx::new(db.registry(), g, None)?;
    Ok(db.records().iter().all(|r| {
        let v = &r.values;
        let parity_ok = v
            .iter()
            .zip(&ctx.parity)
            .all(|(iv, &p)| round_up(iv.lo(), p) == iv.lo() && round_down(iv.hi(), p) == iv.hi());
        parity_ok
            && ctx
                .edges
                .iter()
                .all(|&(x, y, _)| v[x].lo() >= v[y].lo() && v[y].hi() <= v[x].hi())
    }))
}
