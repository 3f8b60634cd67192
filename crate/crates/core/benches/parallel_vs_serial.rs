//! Criterion benches comparing the rayon data-parallel paths against the
//! forced-sequential fallback on the dominant workloads: exact elimination,
//! Kan-condition batteries, and total-cohomology assembly.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use morita_core::exactla::{rat, RatMatrix};
use morita_core::forms::total_complex;
use morita_core::instances;
use morita_core::linmodel::check_lie_n_groupoid;
use morita_core::par;

fn dense_matrix(n: usize) -> RatMatrix {
    // small integer entries, like the structure matrices the engine
    // actually eliminates
    RatMatrix::from_fn(n, n, |r, c| rat((r * 31 + c * 17) as i64 % 13 - 6))
}

fn bench_rank(c: &mut Criterion) {
    let mut group = c.benchmark_group("rank");
    group.sample_size(10);
    for n in [16usize, 32, 64] {
        let m = dense_matrix(n);
        group.bench_with_input(BenchmarkId::new("parallel", n), &m, |b, m| {
            par::set_sequential(false);
            b.iter(|| m.rank());
        });
        group.bench_with_input(BenchmarkId::new("sequential", n), &m, |b, m| {
            par::set_sequential(true);
            b.iter(|| m.rank());
        });
    }
    par::set_sequential(false);
    group.finish();
}

fn bench_kan_battery(c: &mut Criterion) {
    let x = instances::pair_groupoid_model(2, 4);
    let mut group = c.benchmark_group("lie_groupoid_check");
    group.sample_size(10);
    group.bench_function("parallel", |b| {
        par::set_sequential(false);
        b.iter(|| check_lie_n_groupoid(&x, 1).unwrap());
    });
    group.bench_function("sequential", |b| {
        par::set_sequential(true);
        b.iter(|| check_lie_n_groupoid(&x, 1).unwrap());
    });
    par::set_sequential(false);
    group.finish();
}

fn bench_total_cohomology(c: &mut Criterion) {
    let mut rng = instances::rng(4);
    let inst = instances::random_hypercover(&mut rng, 1, 4);
    let mut group = c.benchmark_group("total_cohomology");
    group.sample_size(10);
    group.bench_function("parallel", |b| {
        par::set_sequential(false);
        b.iter(|| {
            let tot = total_complex(&inst.x, 2, 3, 4, true).unwrap();
            tot.homology()
        });
    });
    group.bench_function("sequential", |b| {
        par::set_sequential(true);
        b.iter(|| {
            let tot = total_complex(&inst.x, 2, 3, 4, true).unwrap();
            tot.homology()
        });
    });
    par::set_sequential(false);
    group.finish();
}

fn bench_hypercover_batch(c: &mut Criterion) {
    // the batch shape of the acceptance suites: independent instances mapped
    // in parallel
    let mut rng = instances::rng(12);
    let batch: Vec<_> = (0..8).map(|_| instances::random_hypercover(&mut rng, 1, 3)).collect();
    let mut group = c.benchmark_group("hypercover_batch");
    group.sample_size(10);
    group.bench_function("parallel", |b| {
        par::set_sequential(false);
        b.iter(|| {
            par::map_slice(&batch, |inst| {
                morita_core::linmodel::check_hypercover(&inst.f, 1).unwrap().pass
            })
        });
    });
    group.bench_function("sequential", |b| {
        par::set_sequential(true);
        b.iter(|| {
            par::map_slice(&batch, |inst| {
                morita_core::linmodel::check_hypercover(&inst.f, 1).unwrap().pass
            })
        });
    });
    par::set_sequential(false);
    group.finish();
}

criterion_group!(
    benches,
    bench_rank,
    bench_kan_battery,
    bench_total_cohomology,
    bench_hypercover_batch
);
criterion_main!(benches);
