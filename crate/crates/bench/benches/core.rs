use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use hoplab::branching::{simulate_delayed_bp, DEFAULT_CAP, DEFAULT_MAX_GEN};
use hoplab::degree::Law;
use hoplab::graph::pair_all;
use hoplab::limit_law::integer_min_form;
use hoplab::spg::{default_max_level, hopcount};
use hoplab::{rng, DegreeDistribution, DegreeSequence, GroupedDegrees, StubPool};

fn degrees(c: &mut Criterion) {
    let f = DegreeDistribution::build_family(2.8).unwrap();
    let g = f.size_bias();
    let mut r = rng::stream(1, 0);
    c.bench_function("degree/sample", |b| b.iter(|| black_box(f.sample(&mut r))));
    c.bench_function("offspring/sum_1e6", |b| b.iter(|| black_box(g.sample_sum(1_000_000, &mut r))));
    c.bench_function("degree/build_family", |b| b.iter(|| black_box(DegreeDistribution::build_family(2.8).unwrap())));
}

fn graphs(c: &mut Criterion) {
    let f = DegreeDistribution::build_family(2.8).unwrap();
    let mut group = c.benchmark_group("graph");
    group.sample_size(10);
    for n in [10_000usize, 100_000] {
        group.bench_with_input(BenchmarkId::new("pair_all", n), &n, |b, &n| {
            let mut r = rng::stream(2, n as u64);
            let seq = DegreeSequence::draw(n, &f, &mut r).unwrap();
            b.iter(|| black_box(pair_all(&seq, &mut r).unwrap()));
        });
        group.bench_with_input(BenchmarkId::new("sample_rooted", n), &n, |b, &n| {
            let mut r = rng::stream(3, n as u64);
            b.iter(|| black_box(GroupedDegrees::sample_rooted(n, &f, &mut r).unwrap()));
        });
    }
    group.finish();
}

fn hopcounts(c: &mut Criterion) {
    let f = DegreeDistribution::build_family(2.8).unwrap();
    let mut group = c.benchmark_group("hopcount");
    for n in [48_696usize, 723_394] {
        group.bench_with_input(BenchmarkId::new("fresh_pair", n), &n, |b, &n| {
            let mut r = rng::stream(4, n as u64);
            let max_level = default_max_level(n, 2.8);
            b.iter(|| {
                let layout = GroupedDegrees::sample_rooted(n, &f, &mut r).unwrap();
                let mut pool = StubPool::new(&layout);
                black_box(hopcount(&mut pool, 0, 1, max_level, 0.8, &mut r).distance)
            });
        });
    }
    group.finish();
}

fn branching(c: &mut Criterion) {
    let f = DegreeDistribution::build_family(2.8).unwrap();
    let g = f.size_bias();
    let mut r = rng::stream(5, 0);
    c.bench_function("bp/run_cap_1e7", |b| {
        b.iter(|| black_box(simulate_delayed_bp(&f, &g, 2.8, DEFAULT_CAP, DEFAULT_MAX_GEN, &mut r).unwrap().y_n))
    });
}

fn limit_law(c: &mut Criterion) {
    c.bench_function("limit_law/integer_min_form", |b| {
        b.iter(|| black_box(integer_min_form(black_box(1.3), black_box(0.7), 1, 1.25).unwrap()))
    });
}

criterion_group!(benches, degrees, graphs, hopcounts, branching, limit_law);
criterion_main!(benches);
