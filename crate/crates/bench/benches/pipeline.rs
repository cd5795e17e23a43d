use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use std::hint::black_box;

use knotineq_bench::{fixture, propagated_fixture, replicate};
use knotineq_core::graph::transitive_closure;
use knotineq_core::mine::{basic_conjectures, enumerate_conjectures};
use knotineq_core::propagate::propagate;
use knotineq_core::{ExclusionList, InequalityGraph, MineOptions, PropagateOptions};

fn bench_propagate(c: &mut Criterion) {
    let g = InequalityGraph::bundled();
    let base = fixture();
    let mut group = c.benchmark_group("propagate");
    for copies in [1, 16] {
        let db = replicate(&base, copies);
        group.throughput(Throughput::Elements(db.len() as u64));
        for jobs in [1, 0] {
            let opts = PropagateOptions {
                jobs,
                ..Default::default()
            };
            let name = if jobs == 1 { "serial" } else { "parallel" };
            group.bench_with_input(BenchmarkId::new(name, db.len()), &db, |b, db| {
                b.iter(|| propagate(black_box(db), &g, &opts).unwrap())
            });
        }
    }
    group.finish();
}

fn bench_closure(c: &mut Criterion) {
    let g = InequalityGraph::bundled();
    c.bench_function("transitive_closure", |b| b.iter(|| transitive_closure(black_box(&g))));
}

fn bench_mine(c: &mut Criterion) {
    let g = InequalityGraph::bundled();
    let db = propagated_fixture();
    let excl = ExclusionList::default();
    let opts = MineOptions::default();
    c.bench_function("enumerate_conjectures", |b| {
        b.iter(|| enumerate_conjectures(black_box(&db), &g, &excl, &opts).unwrap())
    });
    let conj = enumerate_conjectures(&db, &g, &excl, &opts).unwrap();
    c.bench_function("basic_conjectures", |b| {
        b.iter(|| basic_conjectures(&g, black_box(&conj), db.registry()).unwrap())
    });
}

criterion_group!(benches, bench_propagate, bench_closure, bench_mine);
criterion_main!(benches);
