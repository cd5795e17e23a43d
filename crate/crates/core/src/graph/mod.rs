//! The inequality network: vertices, labelled `greater >= lesser` edges,
//! reachability and DOT rendering.

mod closure;
mod dot;

pub use closure::{transitive_closure, transitive_reduction_modulo, Relation};
pub use dot::export_dot;

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("vertex {0:?} listed twice")]
    DuplicateVertex(String),
    #[error("edge {label} refers to unknown vertex {vertex:?}")]
    UnknownVertex { label: u32, vertex: String },
    #[error("edge {label} repeats {greater} >= {lesser}")]
    DuplicateEdge {
        label: u32,
        greater: String,
        lesser: String,
    },
    #[error("label {0} used twice")]
    DuplicateLabel(u32),
    #[error("edge {0} is a self-loop")]
    SelfLoop(u32),
    #[error("labels must cover 1..={max} without gaps; missing {missing:?}")]
    LabelGap { max: u32, missing: Vec<u32> },
    #[error("cycle through {0:?}")]
    CycleDetected(Vec<String>),
}

/// One inequality `greater(K) >= lesser(K)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub label: u32,
    pub greater: String,
    pub lesser: String,
    pub citation: String,
}

impl Edge {
    pub fn new(label: u32, greater: &str, lesser: &str, citation: &str) -> Self {
        Edge {
            label,
            greater: greater.to_string(),
            lesser: lesser.to_string(),
            citation: citation.to_string(),
        }
    }
}

/// Validated acyclic inequality graph. Edges are kept sorted by label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InequalityGraph {
    vertices: Vec<String>,
    displays: Vec<String>,
    index: HashMap<String, usize>,
    edges: Vec<Edge>,
    // (greater, lesser) vertex indices, parallel to `edges`
    pairs: Vec<(usize, usize)>,
}

impl InequalityGraph {
    pub const BUNDLED: &'static str = include_str!("../../data/graph.tsv");

    /// The 33-vertex, 46-edge network shipped with the crate.
    pub fn bundled() -> Self {
        load_graph(Self::BUNDLED).expect("bundled graph is valid")
    }

    /// Validates vertices (`(id, display)`) and edges.
    pub fn from_parts(vertices: Vec<(String, String)>, mut edges: Vec<Edge>) -> Result<Self, GraphError> {
        let mut index = HashMap::with_capacity(vertices.len());
        for (i, (id, _)) in vertices.iter().enumerate() {
            if index.insert(id.clone(), i).is_some() {
                return Err(GraphError::DuplicateVertex(id.clone()));
            }
        }

        let mut labels = HashSet::new();
        let mut seen = HashSet::new();
        let mut pairs = Vec::with_capacity(edges.len());
        edges.sort_by_key(|e| e.label);
        for e in &edges {
            if !labels.insert(e.label) {
                return Err(GraphError::DuplicateLabel(e.label));
            }
            let lookup = |v: &str| {
                index.get(v).copied().ok_or_else(|| GraphError::UnknownVertex {
                    label: e.label,
                    vertex: v.to_string(),
                })
            };
            let (g, l) = (lookup(&e.greater)?, lookup(&e.lesser)?);
            if g == l {
                return Err(GraphError::SelfLoop(e.label));
            }
            if !seen.insert((g, l)) {
                return Err(GraphError::DuplicateEdge {
                    label: e.label,
                    greater: e.greater.clone(),
                    lesser: e.lesser.clone(),
                });
            }
            pairs.push((g, l));
        }
        let max = edges.last().map_or(0, |e| e.label);
        let missing: Vec<u32> = (1..=max).filter(|l| !labels.contains(l)).collect();
        if !missing.is_empty() || labels.contains(&0) {
            return Err(GraphError::LabelGap { max, missing });
        }

        let (ids, displays) = vertices.into_iter().unzip();
        let graph = InequalityGraph {
            vertices: ids,
            displays,
            index,
            edges,
            pairs,
        };
        if let Some(cycle) = graph.find_cycle() {
            return Err(GraphError::CycleDetected(
                cycle.into_iter().map(|v| graph.vertices[v].clone()).collect(),
            ));
        }
        Ok(graph)
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn display(&self, v: usize) -> &str {
        &self.displays[v]
    }

    pub fn vertex_index(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// `(greater, lesser)` vertex indices, parallel to [`Self::edges`].
    pub fn index_pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn edge(&self, label: u32) -> Option<&Edge> {
        self.edges
            .binary_search_by_key(&label, |e| e.label)
            .ok()
            .map(|i| &self.edges[i])
    }

    pub fn has_edge(&self, greater: usize, lesser: usize) -> bool {
        self.pairs.contains(&(greater, lesser))
    }

    pub fn successors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.pairs.iter().filter(move |p| p.0 == v).map(|p| p.1)
    }

    /// Connected when edge directions are ignored.
    pub fn is_weakly_connected(&self) -> bool {
        let n = self.vertices.len();
        if n == 0 {
            return true;
        }
        let mut adj = vec![Vec::new(); n];
        for &(g, l) in &self.pairs {
            adj[g].push(l);
            adj[l].push(g);
        }
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    fn find_cycle(&self) -> Option<Vec<usize>> {
        // Kahn's algorithm; whatever is left over sits on or behind a cycle.
        let n = self.vertices.len();
        let mut indeg = vec![0usize; n];
        for &(_, l) in &self.pairs {
            indeg[l] += 1;
        }
        let mut queue: VecDeque<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
        let mut removed = 0;
        while let Some(v) = queue.pop_front() {
            removed += 1;
            for w in self.successors(v).collect::<Vec<_>>() {
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    queue.push_back(w);
                }
            }
        }
        if removed == n {
            return None;
        }
        let left: BTreeSet<usize> = (0..n).filter(|&v| indeg[v] > 0).collect();
        // walk predecessors inside the leftover set until a vertex repeats
        let mut path = vec![*left.iter().next().unwrap()];
        loop {
            let cur = *path.last().unwrap();
            let next = self
                .pairs
                .iter()
                .find(|&&(g, l)| l == cur && left.contains(&g))
                .map(|&(g, _)| g)
                .expect("leftover vertices have a leftover predecessor");
            if let Some(pos) = path.iter().position(|&v| v == next) {
                let mut cycle = path[pos..].to_vec();
                cycle.reverse();
                return Some(cycle);
            }
            path.push(next);
        }
    }
}

/// Parses a graph description: `[vertices]` then `[edges]` sections,
/// tab-separated fields, `#` comments.
pub fn load_graph(text: &str) -> Result<InequalityGraph, GraphError> {
    enum Section {
        None,
        Vertices,
        Edges,
    }
    let mut section = Section::None;
    let mut vertices = Vec::new();
    let mut edges = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim_end();
        let syntax = |message: &str| GraphError::Syntax {
            line: n + 1,
            message: message.to_string(),
        };
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        match line.trim() {
            "[vertices]" => {
                section = Section::Vertices;
                continue;
            }
            "[edges]" => {
                section = Section::Edges;
                continue;
            }
            _ => {}
        }
        let fields: Vec<&str> = line.split('\t').map(str::trim).collect();
        match section {
            Section::None => return Err(syntax("data before a [vertices] or [edges] header")),
            Section::Vertices => match fields.as_slice() {
                [id] => vertices.push((id.to_string(), id.to_string())),
                [id, display] => vertices.push((id.to_string(), display.to_string())),
                _ => return Err(syntax("expected `id<TAB>display`")),
            },
            Section::Edges => match fields.as_slice() {
                [label, greater, lesser, citation] => {
                    let label = label
                        .parse::<u32>()
                        .map_err(|_| syntax("edge label is not a positive integer"))?;
                    edges.push(Edge::new(label, greater, lesser, citation));
                }
                _ => return Err(syntax("expected `label<TAB>greater<TAB>lesser<TAB>citation`")),
            },
        }
    }
    InequalityGraph::from_parts(vertices, edges)
}
