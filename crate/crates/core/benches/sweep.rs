use std::hint::black_box;

use ckp_core::centralinv::{evaluate_point, sample_generic, Gates, PipelineTables};
use ckp_core::frobenius::frob_point;
use ckp_core::par;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

const POINTS: u64 = 16;

fn sweep(c: &mut Criterion) {
    let mut g = c.benchmark_group("cinv_sweep");
    g.sample_size(10);
    for n in [1usize, 3] {
        let tables = PipelineTables::new(n).unwrap();
        let points: Vec<_> = (0..POINTS).map(|s| sample_generic(n, s, &Gates::sampling()).unwrap()).collect();
        let eval = |(p, f): &(_, _)| evaluate_point(p, f, Some(&tables), 1e-9).unwrap().max_dev_closed;
        g.bench_with_input(BenchmarkId::new("parallel", n), &points, |b, pts| {
            b.iter(|| par::map(pts.iter().collect(), eval))
        });
        g.bench_with_input(BenchmarkId::new("sequential", n), &points, |b, pts| {
            b.iter(|| par::map_seq(pts.iter().collect(), eval))
        });
    }
    g.finish();
}

fn frobenius(c: &mut Criterion) {
    let mut g = c.benchmark_group("frobenius_points");
    g.sample_size(10);
    let n = 3;
    let points: Vec<_> = (0..POINTS).map(|s| sample_generic(n, s, &Gates::sampling()).unwrap().0).collect();
    let eval = |p: &_| frob_point(p).unwrap().associative();
    g.bench_function("parallel", |b| b.iter(|| black_box(par::map(points.iter().collect(), eval))));
    g.bench_function("sequential", |b| b.iter(|| black_box(par::map_seq(points.iter().collect(), eval))));
    g.finish();
}

criterion_group!(benches, sweep, frobenius);
criterion_main!(benches);
