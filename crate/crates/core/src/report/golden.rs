use std::fmt;

use crate::model::{Interval, KnotDatabase, KnotId};

use super::ReportError;

/// Knots for which a vertex is claimed to equal `target`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoldenList {
    pub name: String,
    pub vertex: String,
    pub target: i64,
    /// Names as written in the source list.
    pub knots: Vec<String>,
}

impl GoldenList {
    pub const U2: &'static str = include_str!("../../data/golden/u2.txt");
    pub const GDS4: &'static str = include_str!("../../data/golden/gds4.txt");
    pub const GDS6: &'static str = include_str!("../../data/golden/gds6.txt");

    /// `u2-list`, `gds4-list`, `gds6-list`.
    pub fn bundled() -> Vec<GoldenList> {
        [Self::U2, Self::GDS4, Self::GDS6]
            .iter()
            .map(|t| GoldenList::parse(t).expect("bundled golden list parses"))
            .collect()
    }

    pub fn bundled_named(name: &str) -> Option<GoldenList> {
        Self::bundled().into_iter().find(|l| l.name == name)
    }

    /// `# name:`, `# vertex:` and `# target:` header lines, then one knot name
    /// per line. Other `#` lines are comments.
    pub fn parse(text: &str) -> Result<Self, ReportError> {
        let (mut name, mut vertex, mut target) = (None, None, None);
        let mut knots = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            let bad = |message: &str| ReportError::Golden {
                line: n + 1,
                message: message.to_string(),
            };
            if line.is_empty() {
                continue;
            }
            if let Some(comment) = line.strip_prefix('#') {
                if let Some((key, value)) = comment.split_once(':') {
                    let value = value.trim().to_string();
                    match key.trim() {
                        "name" => name = Some(value),
                        "vertex" => vertex = Some(value),
                        "target" => target = Some(value.parse::<i64>().map_err(|_| bad("target is not an integer"))?),
                        _ => {}
                    }
                }
                continue;
            }
            KnotId::new(line).map_err(|_| bad("empty knot name"))?;
            knots.push(line.to_string());
        }
        let missing = |what: &str| ReportError::Golden {
            line: 0,
            message: format!("missing `# {what}:` header"),
        };
        Ok(GoldenList {
            name: name.ok_or_else(|| missing("name"))?,
            vertex: vertex.ok_or_else(|| missing("vertex"))?,
            target: target.ok_or_else(|| missing("target"))?,
            knots,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GoldenOutcome {
    Pass,
    /// Present but not exact at the target.
    Miss(Interval),
    Absent,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoldenReport {
    pub name: String,
    pub vertex: String,
    pub target: i64,
    pub results: Vec<(String, GoldenOutcome)>,
}

impl GoldenReport {
    pub fn passes(&self) -> usize {
        self.results.iter().filter(|r| r.1 == GoldenOutcome::Pass).count()
    }

    pub fn passed(&self) -> bool {
        self.passes() == self.results.len()
    }

    /// Listed knots present in the database whose interval contains the
    /// target (exact or not).
    pub fn consistent(&self) -> usize {
        self.results
            .iter()
            .filter(|r| match &r.1 {
                GoldenOutcome::Pass => true,
                GoldenOutcome::Miss(iv) => iv.contains(self.target),
                GoldenOutcome::Absent => false,
            })
            .count()
    }
}

impl fmt::Display for GoldenReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{}: {}/{} pass ({} = {})",
            self.name,
            self.passes(),
            self.results.len(),
            self.vertex,
            self.target
        )?;
        for (knot, outcome) in &self.results {
            match outcome {
                GoldenOutcome::Pass => {}
                GoldenOutcome::Miss(iv) => writeln!(f, "  miss {knot}: {iv}")?,
                GoldenOutcome::Absent => writeln!(f, "  absent {knot}")?,
            }
        }
        Ok(())
    }
}

/// A knot passes when its vertex is exact at the target.
pub fn check_golden(db: &KnotDatabase, list: &GoldenList) -> Result<GoldenReport, ReportError> {
    let v = db
        .registry()
        .lookup(&list.vertex)
        .ok_or_else(|| ReportError::UnknownVertex(list.vertex.clone()))?;
    let results = list
        .knots
        .iter()
        .map(|name| {
            let outcome = match KnotId::new(name).ok().and_then(|k| db.get(&k)) {
                None => GoldenOutcome::Absent,
                Some(r) if r.get(v).value() == Some(list.target) => GoldenOutcome::Pass,
                Some(r) => GoldenOutcome::Miss(r.get(v)),
            };
            (name.clone(), outcome)
        })
        .collect();
    Ok(GoldenReport {
        name: list.name.clone(),
        vertex: list.vertex.clone(),
        target: list.target,
        results,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{build_database, parse_knotinfo_csv, ColumnMapping};
    use crate::model::{KnotRecord, Registry};
    use std::collections::HashSet;

    #[test]
    fn bundled_lists() {
        let lists = GoldenList::bundled();
        let shape: Vec<(&str, &str, i64, usize)> = lists
            .iter()
            .map(|l| (l.name.as_str(), l.vertex.as_str(), l.target, l.knots.len()))
            .collect();
        assert_eq!(
            shape,
            [
                ("u2-list", "2u", 4, 36),
                ("gds4-list", "gds", 4, 88),
                ("gds6-list", "gds", 6, 15)
            ]
        );
        for l in &lists {
            let ids: HashSet<KnotId> = l.knots.iter().map(|k| KnotId::new(k).unwrap()).collect();
            assert_eq!(ids.len(), l.knots.len(), "{} has duplicates", l.name);
            assert!(l.knots.iter().all(|k| k.starts_with("13")));
        }
        assert_eq!(GoldenList::bundled_named("gds6-list").unwrap().target, 6);
        assert!(GoldenList::bundled_named("nope").is_none());
    }

    #[test]
    fn fixture_lacks_listed_knots() {
        let doc = include_str!("../../data/fixture/knotinfo_le9.csv");
        let raw = parse_knotinfo_csv(doc, &ColumnMapping::bundled()).unwrap();
        let db = build_database(&raw, &[], &Registry::standard()).unwrap();
        let r = check_golden(&db, &GoldenList::bundled_named("u2-list").unwrap()).unwrap();
        assert_eq!(r.results.len(), 36);
        assert!(r.results.iter().all(|x| x.1 == GoldenOutcome::Absent));
        assert!(!r.passed());
        assert!(r
            .to_string()
            .starts_with("u2-list: 0/36 pass (2u = 4)\n  absent 13n_{128}\n"));
    }

    #[test]
    fn pass_and_miss() {
        let reg = Registry::standard();
        let mut db = KnotDatabase::new(reg.clone());
        let u = reg.lookup("2u").unwrap();
        for (name, iv) in [("A", Interval::exact(4).unwrap()), ("B", Interval::new(2, 4).unwrap())] {
            let mut r = KnotRecord::unknown(KnotId::new(name).unwrap(), reg.len());
            r.values[u.0] = iv;
            db.push_record(r).unwrap();
        }
        let list = GoldenList::parse("# name: t\n# vertex: 2u\n# target: 4\nA\nB\nC\n").unwrap();
        let r = check_golden(&db, &list).unwrap();
        assert_eq!(r.passes(), 1);
        assert_eq!(r.consistent(), 2);
        assert_eq!(r.results[1].1, GoldenOutcome::Miss(Interval::new(2, 4).unwrap()));
        assert_eq!(r.results[2].1, GoldenOutcome::Absent);
    }

    #[test]
    fn parse_errors() {
        assert!(GoldenList::parse("# name: t\n# vertex: 2u\nA\n").is_err());
        assert!(GoldenList::parse("# name: t\n# vertex: 2u\n# target: x\n").is_err());
        let list = GoldenList::parse("# name: t\n# vertex: zz\n# target: 1\n").unwrap();
        let db = KnotDatabase::new(Registry::standard());
        assert!(matches!(check_golden(&db, &list), Err(ReportError::UnknownVertex(_))));
    }
}
