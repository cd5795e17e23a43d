use std::collections::HashSet;

use crate::model::{Bound, KnotId, RawInterval, Registry, SourceClass};

use super::IngestError;

/// Accepted value syntax of a mapped column.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValueSyntax {
    Unsigned,
    /// Negative values allowed (signature, tau, s).
    Signed,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MappedColumn {
    pub header: String,
    pub vertex: String,
    pub syntax: ValueSyntax,
}

/// Which CSV header feeds which vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnMapping {
    pub knot_column: String,
    pub columns: Vec<MappedColumn>,
}

impl ColumnMapping {
    pub const BUNDLED: &'static str = include_str!("../../data/mapping.tsv");

    pub fn bundled() -> Self {
        ColumnMapping::parse(Self::BUNDLED).expect("bundled mapping parses")
    }

    /// Parses `header<TAB>vertex<TAB>unsigned|signed` lines; the `@knot`
    /// pseudo-vertex names the knot column.
    pub fn parse(text: &str) -> Result<Self, IngestError> {
        let mut knot_column = None;
        let mut columns = Vec::new();
        for (n, line) in text.lines().enumerate() {
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let bad = |message: &str| IngestError::Mapping {
                line: n + 1,
                message: message.to_string(),
            };
            let fields: Vec<&str> = line.split('\t').map(str::trim).collect();
            match fields.as_slice() {
                [header, "@knot"] => {
                    if knot_column.replace(header.to_string()).is_some() {
                        return Err(bad("knot column given twice"));
                    }
                }
                [header, vertex, syntax] => {
                    let syntax = match *syntax {
                        "unsigned" => ValueSyntax::Unsigned,
                        "signed" => ValueSyntax::Signed,
                        _ => return Err(bad("syntax must be `unsigned` or `signed`")),
                    };
                    columns.push(MappedColumn {
                        header: header.to_string(),
                        vertex: vertex.to_string(),
                        syntax,
                    });
                }
                _ => return Err(bad("expected `header<TAB>vertex<TAB>syntax`")),
            }
        }
        let knot_column = knot_column.ok_or(IngestError::Mapping {
            line: 0,
            message: "no `@knot` column".to_string(),
        })?;
        Ok(ColumnMapping { knot_column, columns })
    }

    /// Every mapped vertex is registered and every KnotInfo-class vertex is
    /// fed by exactly one column.
    pub fn validate(&self, registry: &Registry) -> Result<(), IngestError> {
        let mut fed = HashSet::new();
        for c in &self.columns {
            let v = registry
                .lookup(&c.vertex)
                .ok_or_else(|| IngestError::UnknownVertex(c.vertex.clone()))?;
            if !fed.insert(v) {
                return Err(IngestError::DuplicateMapping(c.vertex.clone()));
            }
        }
        for v in registry.indices() {
            let def = registry.get(v);
            if def.source_class == SourceClass::KnotInfo && !fed.contains(&v) {
                return Err(IngestError::MissingMapping(def.id.clone()));
            }
        }
        Ok(())
    }
}

/// A cell that is neither blank nor a readable value or range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("unreadable cell")]
pub struct InvalidCell;

/// Parses one cell: `n`, `[a,b]`, `a..b` (`b` may be `inf`); blank or
/// `unknown` is absent.
pub fn parse_cell(text: &str, syntax: ValueSyntax) -> Result<Option<RawInterval>, InvalidCell> {
    let t = text.trim();
    if t.is_empty() || t.eq_ignore_ascii_case("unknown") {
        return Ok(None);
    }
    let int = |s: &str| -> Result<i64, InvalidCell> {
        let s = s.trim();
        let v = s.parse::<i64>().map_err(|_| InvalidCell)?;
        if v < 0 && syntax == ValueSyntax::Unsigned || s.starts_with('+') {
            return Err(InvalidCell);
        }
        Ok(v)
    };
    let upper = |s: &str| -> Result<Bound, InvalidCell> {
        match s.trim() {
            "inf" | "infty" | "∞" => Ok(Bound::Infinite),
            s => int(s).map(Bound::Finite),
        }
    };
    let (lo, hi) = if let Some(inner) = t.strip_prefix('[') {
        let inner = inner
            .strip_suffix(']')
            .or_else(|| inner.strip_suffix(')'))
            .ok_or(InvalidCell)?;
        let (a, b) = inner.split_once(',').ok_or(InvalidCell)?;
        (int(a)?, upper(b)?)
    } else if let Some((a, b)) = t.split_once("..") {
        (int(a)?, upper(b)?)
    } else {
        let v = int(t)?;
        (v, Bound::Finite(v))
    };
    RawInterval::new(lo, hi).map(Some).map_err(|_| InvalidCell)
}

/// Raw (invariant-unit) values of one knot, keyed by vertex id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawRow {
    pub knot: KnotId,
    pub values: Vec<(String, RawInterval)>,
}

/// Parsed export, rows in file order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RawTable {
    pub rows: Vec<RawRow>,
}

/// Reads a comma-separated KnotInfo export with a header row.
pub fn parse_knotinfo_csv(document: &str, mapping: &ColumnMapping) -> Result<RawTable, IngestError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(document.as_bytes());
    let headers = reader.headers()?.clone();
    let position = |h: &str| {
        headers
            .iter()
            .position(|x| x.trim() == h)
            .ok_or_else(|| IngestError::UnknownColumn(h.to_string()))
    };
    let knot_col = position(&mapping.knot_column)?;
    let cols = mapping
        .columns
        .iter()
        .map(|c| position(&c.header).map(|p| (p, c)))
        .collect::<Result<Vec<_>, _>>()?;

    let mut seen = HashSet::new();
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        // header is line 1
        let row = i + 2;
        let malformed = |column: &str, text: &str| IngestError::MalformedCell {
            row,
            column: column.to_string(),
            text: text.to_string(),
        };
        let name = record.get(knot_col).unwrap_or("");
        let knot = KnotId::new(name).map_err(|_| malformed(&mapping.knot_column, name))?;
        if !seen.insert(knot.clone()) {
            return Err(IngestError::DuplicateKnot(knot.to_string()));
        }
        let mut values = Vec::new();
        for &(p, c) in &cols {
            let text = record.get(p).unwrap_or("");
            if let Some(raw) = parse_cell(text, c.syntax).map_err(|_| malformed(&c.header, text))? {
                values.push((c.vertex.clone(), raw));
            }
        }
        rows.push(RawRow { knot, values });
    }
    Ok(RawTable { rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn raw(lo: i64, hi: i64) -> RawInterval {
        RawInterval::new(lo, hi).unwrap()
    }

    #[test]
    fn cell_syntax() {
        use ValueSyntax::*;
        assert_eq!(parse_cell("2", Unsigned), Ok(Some(raw(2, 2))));
        assert_eq!(parse_cell("[1,2]", Unsigned), Ok(Some(raw(1, 2))));
        assert_eq!(parse_cell("[2, 4]", Unsigned), Ok(Some(raw(2, 4))));
        assert_eq!(parse_cell("1..3", Unsigned), Ok(Some(raw(1, 3))));
        assert_eq!(
            parse_cell("[7,inf]", Unsigned),
            Ok(Some(RawInterval::new(7, Bound::Infinite).unwrap()))
        );
        assert_eq!(
            parse_cell("[7,infty)", Unsigned),
            Ok(Some(RawInterval::new(7, Bound::Infinite).unwrap()))
        );
        assert_eq!(parse_cell("", Unsigned), Ok(None));
        assert_eq!(parse_cell(" Unknown ", Unsigned), Ok(None));
        assert_eq!(parse_cell("-3", Signed), Ok(Some(raw(-3, -3))));
        assert_eq!(parse_cell("-3", Unsigned), Err(InvalidCell));
        assert_eq!(parse_cell("[3,1]", Unsigned), Err(InvalidCell));
        assert_eq!(parse_cell("x", Unsigned), Err(InvalidCell));
        assert_eq!(parse_cell("[1,2", Unsigned), Err(InvalidCell));
        assert_eq!(parse_cell("+2", Unsigned), Err(InvalidCell));
    }

    #[test]
    fn bundled_mapping_is_valid() {
        let m = ColumnMapping::bundled();
        assert_eq!(m.knot_column, "Name");
        assert_eq!(m.columns.len(), 19);
        m.validate(&Registry::standard()).unwrap();
        let signed: Vec<&str> = m
            .columns
            .iter()
            .filter(|c| c.syntax == ValueSyntax::Signed)
            .map(|c| c.vertex.as_str())
            .collect();
        assert_eq!(signed, ["|sigma|", "|s|", "2|tau|"]);
    }

    #[test]
    fn mapping_validation_errors() {
        let reg = Registry::standard();
        let mut m = ColumnMapping::bundled();
        m.columns.pop();
        assert!(matches!(m.validate(&reg), Err(IngestError::MissingMapping(v)) if v == "spFa"));

        let mut m = ColumnMapping::bundled();
        m.columns[1].vertex = "c".into();
        assert!(matches!(m.validate(&reg), Err(IngestError::DuplicateMapping(_))));

        let mut m = ColumnMapping::bundled();
        m.columns[0].vertex = "nope".into();
        assert!(matches!(m.validate(&reg), Err(IngestError::UnknownVertex(_))));

        assert!(matches!(
            ColumnMapping::parse("Name\tc\tweird\n"),
            Err(IngestError::Mapping { line: 1, .. })
        ));
        assert!(matches!(
            ColumnMapping::parse("X\tc\tunsigned\n"),
            Err(IngestError::Mapping { .. })
        ));
    }

    fn mini_mapping() -> ColumnMapping {
        ColumnMapping::parse("Name\t@knot\nUnknotting Number\t2u\tunsigned\nSignature\t|sigma|\tsigned\n").unwrap()
    }

    #[test]
    fn parses_rows() {
        let doc = "Name,Unknotting Number,Signature\n3_1,1,-2\n13n_{128},\"[1,2]\",\n";
        let t = parse_knotinfo_csv(doc, &mini_mapping()).unwrap();
        assert_eq!(t.rows.len(), 2);
        assert_eq!(t.rows[0].knot.as_str(), "31");
        assert_eq!(
            t.rows[0].values,
            vec![("2u".to_string(), raw(1, 1)), ("|sigma|".to_string(), raw(-2, -2))]
        );
        assert_eq!(t.rows[1].knot.as_str(), "13n128");
        assert_eq!(t.rows[1].values, vec![("2u".to_string(), raw(1, 2))]);
    }

    #[test]
    fn csv_errors() {
        let m = mini_mapping();
        let err = parse_knotinfo_csv("Name,Unknotting Number,Signature\n3_1,-1,0\n", &m).unwrap_err();
        assert!(matches!(err, IngestError::MalformedCell { row: 2, ref column, .. } if column == "Unknotting Number"));
        let err = parse_knotinfo_csv("Name,Signature\n3_1,0\n", &m).unwrap_err();
        assert!(matches!(err, IngestError::UnknownColumn(c) if c == "Unknotting Number"));
        let err = parse_knotinfo_csv("Name,Unknotting Number,Signature\n3_1,1,0\n3_{1},1,0\n", &m).unwrap_err();
        assert!(matches!(err, IngestError::DuplicateKnot(k) if k == "31"));
    }
}
