use super::*;
use crate::graph::Edge;
use crate::ingest::{build_database, parse_knotinfo_csv, ColumnMapping};
use crate::model::{KnotRecord, Parity, SourceClass, Transform, VertexDef};
use crate::propagate::{propagate, PropagateOptions};
use proptest::prelude::*;
use std::collections::BTreeSet;

fn iv(lo: i64, hi: i64) -> Interval {
    Interval::new(lo, hi).unwrap()
}

fn small(n: usize, edges: &[(usize, usize)]) -> (Registry, InequalityGraph) {
    let ids: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    let reg = Registry::new(
        ids.iter()
            .map(|id| VertexDef::new(id, id, id, Transform::IDENTITY, Parity::Any, SourceClass::Unknown))
            .collect(),
    )
    .unwrap();
    let g = InequalityGraph::from_parts(
        ids.iter().map(|i| (i.clone(), i.clone())).collect(),
        edges
            .iter()
            .enumerate()
            .map(|(k, &(a, b))| Edge::new(k as u32 + 1, &ids[a], &ids[b], "t"))
            .collect(),
    )
    .unwrap();
    (reg, g)
}

fn db_of(reg: &Registry, knots: &[Vec<Interval>]) -> KnotDatabase {
    let mut db = KnotDatabase::new(reg.clone());
    for (i, values) in knots.iter().enumerate() {
        db.push_record(KnotRecord {
            knot: KnotId::new(&format!("k{i}")).unwrap(),
            values: values.clone(),
        })
        .unwrap();
    }
    db
}

fn conj(db: &KnotDatabase, g: &InequalityGraph, excl: &ExclusionList) -> Vec<(usize, usize)> {
    enumerate_conjectures(db, g, excl, &MineOptions::default())
        .unwrap()
        .iter()
        .map(|c| (c.greater.0, c.lesser.0))
        .collect()
}

#[test]
fn classification() {
    assert_eq!(classify(iv(1, 2), iv(3, 4)), Verdict::Violation);
    assert_eq!(classify(iv(3, 3), iv(3, 3)), Verdict::Equality);
    assert_eq!(classify(iv(5, 6), iv(3, 4)), Verdict::Strict);
    assert_eq!(classify(iv(3, 4), iv(3, 4)), Verdict::Undetermined);
    assert_eq!(classify(iv(3, 3), iv(0, 3)), Verdict::Undetermined);
    assert_eq!(classify(Interval::UNKNOWN, iv(2, 2)), Verdict::Undetermined);
}

#[test]
fn equal_everywhere_has_no_strict_witness() {
    let (reg, g) = small(2, &[]);
    let db = db_of(&reg, &[vec![iv(5, 5), iv(5, 5)], vec![iv(5, 5), iv(5, 5)]]);
    let all = scan_pairs(&db, &g, &ExclusionList::empty(), &MineOptions::default()).unwrap();
    assert!(all.iter().all(|c| c.status == Status::Rejected(RejectReason::NoStrict)));
}

#[test]
fn one_equality_one_strict() {
    let (reg, g) = small(2, &[]);
    let db = db_of(&reg, &[vec![iv(4, 4), iv(4, 4)], vec![iv(7, 7), iv(5, 5)]]);
    let all = scan_pairs(&db, &g, &ExclusionList::empty(), &MineOptions::default()).unwrap();
    assert_eq!(all[0].status, Status::Conj);
    assert_eq!(all[0].equality.samples[0].as_str(), "k0");
    assert_eq!(all[0].strict.samples[0].as_str(), "k1");
    assert_eq!(all[1].status, Status::Rejected(RejectReason::Violated));
}

#[test]
fn closure_and_exclusions() {
    let (reg, g) = small(3, &[(0, 1)]);
    let db = db_of(
        &reg,
        &[vec![iv(4, 4), iv(4, 4), iv(4, 4)], vec![iv(7, 7), iv(5, 5), iv(1, 1)]],
    );
    let all = scan_pairs(&db, &g, &ExclusionList::empty(), &MineOptions::default()).unwrap();
    let status = |a, b| all.iter().find(|c| c.greater.0 == a && c.lesser.0 == b).unwrap().status;
    assert_eq!(status(0, 1), Status::Rejected(RejectReason::InClosure));
    assert_eq!(status(0, 2), Status::Conj);
    assert_eq!(status(1, 2), Status::Conj);

    let excl = ExclusionList::parse("# both ways\nv2\tv1\n").unwrap();
    assert!(excl.contains("v1", "v2"));
    assert_eq!(conj(&db, &g, &excl), vec![(0, 2)]);
    assert!(matches!(
        scan_pairs(&db, &g, &ExclusionList::default(), &MineOptions::default()),
        Err(MineError::UnknownVertex(_))
    ));
    assert!(ExclusionList::parse("a b c\n").is_err());
}

#[test]
fn default_exclusions() {
    let e = ExclusionList::default();
    assert_eq!(e.pairs.len(), 5);
    for (a, b) in [
        ("degPz", "2g"),
        ("2cl", "degPz"),
        ("2cl", "2gc"),
        ("2cl", "2gf"),
        ("2cl", "2br-2"),
    ] {
        assert!(e.contains(a, b) && e.contains(b, a));
    }
    e.resolve(&Registry::standard()).unwrap();
}

#[test]
fn exact_only_skips_interval_cells() {
    let (reg, g) = small(2, &[]);
    let db = db_of(&reg, &[vec![iv(4, 4), iv(4, 4)], vec![iv(5, 9), iv(1, 2)]]);
    let certified = scan_pairs(&db, &g, &ExclusionList::empty(), &MineOptions::default()).unwrap();
    assert_eq!(certified[0].status, Status::Conj);
    let opts = MineOptions {
        exact_only: true,
        ..Default::default()
    };
    let exact = scan_pairs(&db, &g, &ExclusionList::empty(), &opts).unwrap();
    assert_eq!(exact[0].status, Status::Rejected(RejectReason::NoStrict));
    assert_eq!(exact[0].undetermined, 0);
}

fn fixture() -> KnotDatabase {
    let doc = include_str!("../../data/fixture/knotinfo_le9.csv");
    let raw = parse_knotinfo_csv(doc, &ColumnMapping::bundled()).unwrap();
    build_database(&raw, &[], &Registry::standard()).unwrap()
}

#[test]
fn refuses_unpropagated_input() {
    let db = fixture();
    let g = InequalityGraph::bundled();
    assert!(matches!(
        enumerate_conjectures(&db, &g, &ExclusionList::default(), &MineOptions::default()),
        Err(MineError::NotAFixedPoint)
    ));
}

#[test]
fn fixture_run_is_deterministic_and_sound() {
    let g = InequalityGraph::bundled();
    let db = propagate(&fixture(), &g, &PropagateOptions::default()).unwrap().db;
    let excl = ExclusionList::default();
    let a = enumerate_conjectures(
        &db,
        &g,
        &excl,
        &MineOptions {
            jobs: 1,
            ..Default::default()
        },
    )
    .unwrap();
    let b = enumerate_conjectures(
        &db,
        &g,
        &excl,
        &MineOptions {
            jobs: 3,
            ..Default::default()
        },
    )
    .unwrap();
    assert_eq!(a, b);
    assert!(!a.is_empty());
    let closure = transitive_closure(&g);
    let reg = db.registry();
    for c in &a {
        let (x, y) = (&reg.get(c.greater).id, &reg.get(c.lesser).id);
        assert!(!closure.contains(g.vertex_index(x).unwrap(), g.vertex_index(y).unwrap()));
        assert!(!excl.contains(x, y));
        assert!(c.equality.count >= 1 && c.strict.count >= 1 && c.violations.count == 0);
    }
    let basic = basic_conjectures(&g, &a, reg).unwrap();
    assert!(basic.iter().all(|c| c.status == Status::BasicConj));
    assert!(basic
        .iter()
        .all(|c| a.iter().any(|d| (d.greater, d.lesser) == (c.greater, c.lesser))));
    let csv = write_conjectures_csv(&basic, reg);
    assert!(csv.starts_with("greater,lesser,status,equality_witnesses,strict_witnesses,undetermined,sample_equality_knot,sample_strict_knot\n"));
    assert_eq!(csv.lines().count(), basic.len() + 1);
}

#[test]
fn basic_examples() {
    let mk = |reg: &Registry, pairs: &[(usize, usize)]| -> Vec<Conjecture> {
        pairs
            .iter()
            .map(|&(a, b)| Conjecture {
                greater: reg.lookup(&format!("v{a}")).unwrap(),
                lesser: reg.lookup(&format!("v{b}")).unwrap(),
                violations: Witnesses::default(),
                equality: Witnesses::default(),
                strict: Witnesses::default(),
                undetermined: 0,
                status: Status::Conj,
            })
            .collect()
    };
    let pairs_of = |cs: Vec<Conjecture>| cs.iter().map(|c| (c.greater.0, c.lesser.0)).collect::<Vec<_>>();

    let (reg, g) = small(3, &[]);
    let b = basic_conjectures(&g, &mk(&reg, &[(0, 1), (1, 2), (0, 2)]), &reg).unwrap();
    assert_eq!(pairs_of(b), vec![(0, 1), (1, 2)]);

    let (reg, g) = small(3, &[(1, 2)]);
    let b = basic_conjectures(&g, &mk(&reg, &[(0, 1)]), &reg).unwrap();
    assert_eq!(pairs_of(b), vec![(0, 1)]);
}

/// All-pairs, all-knots scan of the five selection conditions on exact data,
/// with reachability by DFS.
fn naive(n: usize, edges: &[(usize, usize)], knots: &[Vec<i64>], excl: &[(usize, usize)]) -> Vec<(usize, usize)> {
    let reaches = |a: usize, b: usize| {
        let mut stack = vec![a];
        let mut seen = vec![false; n];
        while let Some(v) = stack.pop() {
            for &(x, y) in edges {
                if x == v && !seen[y] {
                    if y == b {
                        return true;
                    }
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        false
    };
    let mut out = Vec::new();
    for x in 0..n {
        for y in 0..n {
            if x == y || reaches(x, y) || excl.iter().any(|&p| p == (x, y) || p == (y, x)) {
                continue;
            }
            let holds = knots.iter().all(|k| k[x] >= k[y]);
            let some_equal = knots.iter().any(|k| k[x] == k[y]);
            let some_strict = knots.iter().any(|k| k[x] > k[y]);
            if holds && some_equal && some_strict {
                out.push((x, y));
            }
        }
    }
    out
}

/// Vertex count, graph edges, knot values, exclusion pairs.
type Instance = (usize, Vec<(usize, usize)>, Vec<Vec<i64>>, Vec<(usize, usize)>);

fn arb_instance() -> impl Strategy<Value = Instance> {
    (2usize..=6).prop_flat_map(|n| {
        let fwd = (0..n, 0..n).prop_filter_map("forward", |(a, b)| (a < b).then_some((a, b)));
        let any = (0..n, 0..n).prop_filter_map("distinct", |(a, b)| (a != b).then_some((a, b)));
        (
            Just(n),
            prop::collection::btree_set(fwd, 0..6).prop_map(|s| s.into_iter().collect::<Vec<_>>()),
            prop::collection::vec(prop::collection::vec(0i64..3, n), 1..=20),
            prop::collection::vec(any, 0..3),
        )
    })
}

/// Turns per-vertex noise into values satisfying every edge.
fn lift(n: usize, edges: &[(usize, usize)], noise: &[i64]) -> Vec<i64> {
    let mut v = vec![0; n];
    // forward edges only, so descending index order visits lesser vertices first
    for a in (0..n).rev() {
        let base = edges.iter().filter(|e| e.0 == a).map(|e| v[e.1]).max().unwrap_or(0);
        v[a] = base + noise[a];
    }
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn matches_naive_scan((n, edges, noise, excl_pairs) in arb_instance()) {
        let (reg, g) = small(n, &edges);
        let knots: Vec<Vec<i64>> = noise.iter().map(|z| lift(n, &edges, z)).collect();
        let db = db_of(&reg, &knots.iter().map(|k| k.iter().map(|&x| iv(x, x)).collect()).collect::<Vec<_>>());
        let excl = ExclusionList {
            pairs: excl_pairs.iter().map(|&(a, b)| (format!("v{a}"), format!("v{b}"))).collect(),
        };
        let mut expected = naive(n, &edges, &knots, &excl_pairs);
        let mut got = conj(&db, &g, &excl);
        expected.sort();
        got.sort();
        prop_assert_eq!(got, expected);
    }

    #[test]
    fn basic_is_the_minimal_generating_subset(
        (n, edges, _, _) in arb_instance(),
        extra in prop::collection::btree_set((0usize..6, 0usize..6), 0..8),
    ) {
        let (reg, g) = small(n, &edges);
        let closure = transitive_closure(&g);
        let conj_pairs: Vec<(usize, usize)> = extra
            .into_iter()
            .filter(|&(a, b)| a < b && b < n && !closure.contains(a, b))
            .collect();
        let cs: Vec<Conjecture> = conj_pairs
            .iter()
            .map(|&(a, b)| Conjecture {
                greater: VertexIdx(a),
                lesser: VertexIdx(b),
                violations: Witnesses::default(),
                equality: Witnesses::default(),
                strict: Witnesses::default(),
                undetermined: 0,
                status: Status::Conj,
            })
            .collect();
        let got: BTreeSet<(usize, usize)> = basic_conjectures(&g, &cs, &reg)
            .unwrap()
            .iter()
            .map(|c| (c.greater.0, c.lesser.0))
            .collect();

        // brute force over all subsets, smallest first
        let generates = |subset: &[(usize, usize)]| {
            let rel = crate::graph::Relation::from_pairs(n, closure.pairs().chain(subset.iter().copied())).closure();
            conj_pairs.iter().all(|&(a, b)| rel.contains(a, b))
        };
        let m = conj_pairs.len();
        let mut best: Vec<BTreeSet<(usize, usize)>> = Vec::new();
        for size in 0..=m {
            for mask in 0u32..(1 << m) {
                if mask.count_ones() as usize != size {
                    continue;
                }
                let subset: Vec<_> = (0..m).filter(|i| mask & (1 << i) != 0).map(|i| conj_pairs[i]).collect();
                if generates(&subset) {
                    best.push(subset.into_iter().collect());
                }
            }
            if !best.is_empty() {
                break;
            }
        }
        prop_assert_eq!(best.len(), 1);
        prop_assert_eq!(&got, &best[0]);
    }
}
