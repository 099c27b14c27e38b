//! Parallel vs sequential throughput of the scan inner loop: the grid of
//! derivative evaluations dominates a scan, and each point is independent.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rayon::prelude::*;

use borel_resum::prelude::*;

fn p_grid(n: usize) -> Vec<f64> {
    let (lo, hi) = (1e-2f64.ln(), 1e3f64.ln());
    (0..n)
        .map(|i| (lo + (hi - lo) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

fn bench_scan_grid(c: &mut Criterion) {
    let series = builtin_series(BuiltinModel::Prototype, 5).unwrap();
    let grid = p_grid(301);
    let mut group = c.benchmark_group("scan_grid_n4");
    group.sample_size(10);
    group.bench_with_input(BenchmarkId::new("sequential", grid.len()), &grid, |b, grid| {
        b.iter(|| {
            let engine = Resummator::new(&series, QuadratureSpec::default()).unwrap();
            grid.iter()
                .map(|&p| {
                    engine
                        .derivative(4, 1.0, p, DerivVar::P)
                        .unwrap()
                        .value
                })
                .sum::<f64>()
        })
    });
    group.bench_with_input(BenchmarkId::new("parallel", grid.len()), &grid, |b, grid| {
        b.iter(|| {
            let engine = Resummator::new(&series, QuadratureSpec::default()).unwrap();
            grid.par_iter()
                .map(|&p| {
                    engine
                        .derivative(4, 1.0, p, DerivVar::P)
                        .unwrap()
                        .value
                })
                .sum::<f64>()
        })
    });
    group.finish();
}

fn bench_full_scan(c: &mut Criterion) {
    let series = builtin_series(BuiltinModel::BetaPolymer, 7).unwrap();
    let cfg = ScanConfig::new(1.0);
    let mut group = c.benchmark_group("scan_extrema_beta");
    group.sample_size(10);
    group.bench_function("n7", |b| {
        b.iter(|| scan_extrema(&series, 7, &cfg).unwrap().len())
    });
    group.finish();
}

criterion_group!(benches, bench_scan_grid, bench_full_scan);
criterion_main!(benches);
