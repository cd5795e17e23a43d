use std::collections::VecDeque;

use super::InequalityGraph;

/// A binary relation over `0..n`, stored as one bit row per element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    n: usize,
    words: usize,
    bits: Vec<u64>,
}

impl Relation {
    pub fn empty(n: usize) -> Self {
        let words = n.div_ceil(64).max(1);
        Relation {
            n,
            words,
            bits: vec![0; n * words],
        }
    }

    pub fn from_pairs(n: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut r = Relation::empty(n);
        for (a, b) in pairs {
            r.insert(a, b);
        }
        r
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn insert(&mut self, a: usize, b: usize) -> bool {
        let (w, m) = (a * self.words + b / 64, 1u64 << (b % 64));
        let fresh = self.bits[w] & m == 0;
        self.bits[w] |= m;
        fresh
    }

    pub fn contains(&self, a: usize, b: usize) -> bool {
        self.bits[a * self.words + b / 64] & (1u64 << (b % 64)) != 0
    }

    /// All pairs in row-major order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |a| (0..self.n).filter(move |&b| self.contains(a, b)).map(move |b| (a, b)))
    }

    pub fn len(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    /// `self ⊇ other`.
    pub fn is_superset_of(&self, other: &Relation) -> bool {
        self.n == other.n && self.bits.iter().zip(&other.bits).all(|(a, b)| b & !a == 0)
    }

    /// Irreflexive transitive closure.
    pub fn closure(&self) -> Relation {
        let adj: Vec<Vec<usize>> = (0..self.n)
            .map(|a| (0..self.n).filter(|&b| self.contains(a, b)).collect())
            .collect();
        closure_of(&adj)
    }
}

fn closure_of(adj: &[Vec<usize>]) -> Relation {
    let n = adj.len();
    let mut out = Relation::empty(n);
    let mut seen = vec![usize::MAX; n];
    let mut queue = VecDeque::new();
    for s in 0..n {
        queue.clear();
        queue.extend(adj[s].iter().copied());
        while let Some(v) = queue.pop_front() {
            if seen[v] == s {
                continue;
            }
            seen[v] = s;
            if v != s {
                out.insert(s, v);
            }
            queue.extend(adj[v].iter().copied().filter(|&w| seen[w] != s));
        }
    }
    out
}

/// `(X, Y)` is in the result iff a directed path `X -> ... -> Y` of length at
/// least one exists.
pub fn transitive_closure(g: &InequalityGraph) -> Relation {
    let n = g.vertices().len();
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in g.index_pairs() {
        adj[a].push(b);
    }
    closure_of(&adj)
}

fn reachable(base: &Relation, extra: &[(usize, usize)], skip: usize, from: usize, to: usize) -> bool {
    let n = base.size();
    let mut seen = vec![false; n];
    let mut stack = vec![from];
    seen[from] = true;
    while let Some(v) = stack.pop() {
        let next = (0..n)
            .filter(|&w| base.contains(v, w))
            .chain(
                extra
                    .iter()
                    .enumerate()
                    .filter(|&(i, p)| i != skip && p.0 == v)
                    .map(|(_, p)| p.1),
            )
            .collect::<Vec<_>>();
        for w in next {
            if w == to {
                return true;
            }
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    false
}

/// Smallest subset `B` of `extra` such that the closure of `base ∪ B` still
/// contains every pair of `extra`.
///
/// `base` should already be transitively closed. Pairs are tried for removal
/// in slice order, so callers control tie-breaking by sorting `extra`. A pair
/// that is not derivable from the others stays non-derivable as the kept set
/// shrinks, so one pass reaches the fixed point.
pub fn transitive_reduction_modulo(base: &Relation, extra: &[(usize, usize)]) -> Vec<(usize, usize)> {
    let mut kept: Vec<(usize, usize)> = Vec::with_capacity(extra.len());
    for &p in extra {
        if !kept.contains(&p) {
            kept.push(p);
        }
    }
    let mut i = 0;
    while i < kept.len() {
        let (a, b) = kept[i];
        if base.contains(a, b) || reachable(base, &kept, i, a, b) {
            kept.remove(i);
        } else {
            i += 1;
        }
    }
    kept
}
