use crate::model::{Bound, Interval, KnotId, Registry, SourceClass, VertexIdx};

use super::IngestError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupplementRow {
    pub knot: KnotId,
    pub vertex: VertexIdx,
    /// Vertex units, not invariant units.
    pub value: Interval,
    /// Allows overriding a KnotInfo-sourced vertex.
    pub override_source: bool,
}

/// Extra values for vertices KnotInfo does not tabulate.
///
/// CSV columns `knot,vertex,lo,hi` with an optional fifth column `override`
/// (`yes`/`true`/`1`); `hi` may be `inf`. Lines starting with `#` are skipped.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SupplementTable {
    pub rows: Vec<SupplementRow>,
}

impl SupplementTable {
    pub fn parse(document: &str, registry: &Registry) -> Result<Self, IngestError> {
        // original line number of each kept line
        let mut lines = Vec::new();
        let mut kept = String::with_capacity(document.len());
        for (n, line) in document.lines().enumerate() {
            if !line.trim_start().starts_with('#') {
                lines.push(n + 1);
                kept.push_str(line);
                kept.push('\n');
            }
        }
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(kept.as_bytes());
        let headers = reader.headers()?.clone();
        let expected = ["knot", "vertex", "lo", "hi"];
        if headers.len() < 4 || headers.iter().take(4).ne(expected) {
            return Err(IngestError::UnknownColumn(format!(
                "supplement header must start with {}",
                expected.join(",")
            )));
        }
        let mut rows = Vec::new();
        for (i, record) in reader.records().enumerate() {
            let record = record?;
            let row = record
                .position()
                .and_then(|p| lines.get(p.line() as usize - 1).copied())
                .unwrap_or(i + 2);
            let field = |k: usize| record.get(k).unwrap_or("");
            let malformed = |k: usize| IngestError::MalformedCell {
                row,
                column: headers.get(k).unwrap_or("override").to_string(),
                text: field(k).to_string(),
            };
            if !(4..=5).contains(&record.len()) {
                return Err(malformed(record.len().min(4)));
            }
            let knot = KnotId::new(field(0)).map_err(|_| malformed(0))?;
            let vertex = registry
                .lookup(field(1))
                .ok_or_else(|| IngestError::UnknownVertex(field(1).to_string()))?;
            let lo: i64 = field(2).parse().map_err(|_| malformed(2))?;
            let hi: Bound = field(3).parse().map_err(|_| malformed(3))?;
            let value = Interval::new(lo, hi).map_err(|_| malformed(3))?;
            let override_source = match field(4).to_ascii_lowercase().as_str() {
                "" | "no" | "false" | "0" => false,
                "yes" | "true" | "1" | "override" => true,
                _ => return Err(malformed(4)),
            };
            if registry.get(vertex).source_class == SourceClass::KnotInfo && !override_source {
                return Err(IngestError::SupplementClass {
                    row,
                    vertex: field(1).to_string(),
                });
            }
            rows.push(SupplementRow {
                knot,
                vertex,
                value,
                override_source,
            });
        }
        Ok(SupplementTable { rows })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_rows() {
        let reg = Registry::standard();
        let t = SupplementTable::parse("knot,vertex,lo,hi\n3_1,2a,2,2\n4_1,tr,2,inf\n3_1,c,3,3,yes\n", &reg).unwrap();
        assert_eq!(t.rows.len(), 3);
        assert_eq!(t.rows[0].knot.as_str(), "31");
        assert_eq!(t.rows[0].vertex, reg.lookup("2a").unwrap());
        assert_eq!(t.rows[1].value, Interval::at_least(2).unwrap());
        assert!(t.rows[2].override_source);
    }

    #[test]
    fn bundled_fixture_parses() {
        let reg = Registry::standard();
        let t = SupplementTable::parse(include_str!("../../data/fixture/supplement_le9.csv"), &reg).unwrap();
        assert_eq!(t.rows.len(), 11);
        assert!(t
            .rows
            .iter()
            .all(|r| reg.get(r.vertex).source_class == SourceClass::Reference));
    }

    #[test]
    fn rejects_knotinfo_vertex_without_override() {
        let reg = Registry::standard();
        let err = SupplementTable::parse("knot,vertex,lo,hi\n# note\n3_1,2u,2,2\n", &reg).unwrap_err();
        assert!(matches!(err, IngestError::SupplementClass { row: 3, .. }), "{err:?}");
    }

    #[test]
    fn rejects_bad_rows() {
        let reg = Registry::standard();
        for doc in [
            "knot,vertex,lo,hi\n3_1,tr,3,2\n",
            "knot,vertex,lo,hi\n3_1,tr,x,2\n",
            "knot,vertex,lo,hi\n3_1,tr,-1,2\n",
            "knot,vertex,lo,hi\n3_1,tr,1,2,maybe\n",
            "knot,vertex,lo,hi\n3_1,tr,1\n",
        ] {
            assert!(
                matches!(
                    SupplementTable::parse(doc, &reg),
                    Err(IngestError::MalformedCell { .. })
                ),
                "{doc}"
            );
        }
        assert!(matches!(
            SupplementTable::parse("knot,vertex,lo,hi\n3_1,xx,1,2\n", &reg),
            Err(IngestError::UnknownVertex(_))
        ));
        assert!(matches!(
            SupplementTable::parse("knot,v,lo,hi\n", &reg),
            Err(IngestError::UnknownColumn(_))
        ));
    }
}
