use std::fmt::Write;

use crate::model::{Bound, Interval, KnotDatabase, KnotId, Registry, VertexIdx};

use super::PropagateError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DiffCategory {
    NewExact,
    TightenedLower,
    TightenedUpper,
    TightenedBoth,
    Unchanged,
}

impl DiffCategory {
    pub const CHANGED: [DiffCategory; 4] = [
        DiffCategory::NewExact,
        DiffCategory::TightenedLower,
        DiffCategory::TightenedUpper,
        DiffCategory::TightenedBoth,
    ];

    /// Becoming exact wins over which side moved.
    pub fn of(before: Interval, after: Interval) -> Self {
        let lower = after.lo() != before.lo();
        let upper = after.hi() != before.hi();
        if !before.is_exact() && after.is_exact() {
            DiffCategory::NewExact
        } else {
            match (lower, upper) {
                (true, true) => DiffCategory::TightenedBoth,
                (true, false) => DiffCategory::TightenedLower,
                (false, true) => DiffCategory::TightenedUpper,
                (false, false) => DiffCategory::Unchanged,
            }
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            DiffCategory::NewExact => "new_exact",
            DiffCategory::TightenedLower => "tightened_lower",
            DiffCategory::TightenedUpper => "tightened_upper",
            DiffCategory::TightenedBoth => "tightened_both",
            DiffCategory::Unchanged => "unchanged",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiffRow {
    pub knot: KnotId,
    pub vertex: VertexIdx,
    pub before: Interval,
    pub after: Interval,
    pub category: DiffCategory,
}

/// Changed cells in database order (knot, then vertex).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Diff {
    pub rows: Vec<DiffRow>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DiffSummary {
    /// Counts per vertex, indexed like [`DiffCategory::CHANGED`]; vertices
    /// without changes are omitted.
    pub per_vertex: Vec<(VertexIdx, [usize; 4])>,
    pub totals: [usize; 4],
}

impl DiffSummary {
    pub fn count(&self, category: DiffCategory) -> usize {
        DiffCategory::CHANGED
            .iter()
            .position(|&c| c == category)
            .map_or(0, |i| self.totals[i])
    }

    pub fn changed(&self) -> usize {
        self.totals.iter().sum()
    }

    pub fn render(&self, registry: &Registry) -> String {
        let mut out = String::new();
        writeln!(out, "changed cells: {}", self.changed()).unwrap();
        for (c, n) in DiffCategory::CHANGED.iter().zip(self.totals) {
            writeln!(out, "{}: {}", c.as_str(), n).unwrap();
        }
        if !self.per_vertex.is_empty() {
            out.push('\n');
            let width = self
                .per_vertex
                .iter()
                .map(|(v, _)| registry.get(*v).id.len())
                .max()
                .unwrap_or(0)
                .max(6);
            write!(out, "{:width$}", "vertex").unwrap();
            for c in DiffCategory::CHANGED {
                write!(out, "  {}", c.as_str()).unwrap();
            }
            out.push('\n');
            for (v, counts) in &self.per_vertex {
                write!(out, "{:width$}", registry.get(*v).id).unwrap();
                for (c, n) in DiffCategory::CHANGED.iter().zip(counts) {
                    write!(out, "  {:>w$}", n, w = c.as_str().len()).unwrap();
                }
                out.push('\n');
            }
        }
        out
    }
}

impl Diff {
    pub fn summary(&self) -> DiffSummary {
        let mut per: Vec<Option<[usize; 4]>> = Vec::new();
        let mut totals = [0; 4];
        for r in &self.rows {
            let Some(i) = DiffCategory::CHANGED.iter().position(|&c| c == r.category) else {
                continue;
            };
            if per.len() <= r.vertex.0 {
                per.resize(r.vertex.0 + 1, None);
            }
            per[r.vertex.0].get_or_insert([0; 4])[i] += 1;
            totals[i] += 1;
        }
        DiffSummary {
            per_vertex: per
                .into_iter()
                .enumerate()
                .filter_map(|(v, c)| c.map(|c| (VertexIdx(v), c)))
                .collect(),
            totals,
        }
    }

    /// Only rows for the given vertices.
    pub fn restrict(&self, vertices: &[VertexIdx]) -> Diff {
        Diff {
            rows: self
                .rows
                .iter()
                .filter(|r| vertices.contains(&r.vertex))
                .cloned()
                .collect(),
        }
    }
}

/// One row per cell that differs. Both databases must hold the same knots in
/// the same order over the same registry, and every cell of `after` must lie
/// inside the matching cell of `before`.
pub fn diff(before: &KnotDatabase, after: &KnotDatabase) -> Result<Diff, PropagateError> {
    if before.registry() != after.registry() {
        return Err(PropagateError::MismatchedDatabases("registries differ".into()));
    }
    if before.len() != after.len() {
        return Err(PropagateError::MismatchedDatabases(format!(
            "{} knots before, {} after",
            before.len(),
            after.len()
        )));
    }
    let mut rows = Vec::new();
    for (b, a) in before.records().iter().zip(after.records()) {
        if b.knot != a.knot {
            return Err(PropagateError::MismatchedDatabases(format!(
                "knot {} vs {}",
                b.knot, a.knot
            )));
        }
        for (i, (&bi, &ai)) in b.values.iter().zip(&a.values).enumerate() {
            if bi == ai {
                continue;
            }
            if !ai.is_subset_of(&bi) {
                return Err(PropagateError::MismatchedDatabases(format!(
                    "{} {}: {} is not inside {}",
                    b.knot,
                    before.registry().get(VertexIdx(i)).id,
                    ai,
                    bi
                )));
            }
            rows.push(DiffRow {
                knot: b.knot.clone(),
                vertex: VertexIdx(i),
                before: bi,
                after: ai,
                category: DiffCategory::of(bi, ai),
            });
        }
    }
    Ok(Diff { rows })
}

/// `knot,vertex,before_lo,before_hi,after_lo,after_hi,category`.
pub fn write_diff_csv(d: &Diff, registry: &Registry) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "knot",
        "vertex",
        "before_lo",
        "before_hi",
        "after_lo",
        "after_hi",
        "category",
    ])
    .expect("in-memory write");
    let b = |x: Bound| x.to_string();
    for r in &d.rows {
        w.write_record([
            r.knot.to_string(),
            registry.get(r.vertex).id.clone(),
            r.before.lo().to_string(),
            b(r.before.hi()),
            r.after.lo().to_string(),
            b(r.after.hi()),
            r.category.as_str().to_string(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf-8 fields")
}
