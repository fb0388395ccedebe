use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use cubecolor_core::chains::Ring;
use cubecolor_core::nervecontract::{build_shifted_partition, certify, default_delta, CertifyOptions};
use cubecolor_core::search::random_coloring;

fn partition(c: &mut Criterion) {
    let mut group = c.benchmark_group("shifted partition");
    for (d, n) in [(2, 8), (3, 4), (4, 2)] {
        group.bench_with_input(BenchmarkId::new(format!("d{d}"), n), &n, |b, &n| {
            b.iter(|| build_shifted_partition(d, n, default_delta(n)).unwrap().len())
        });
    }
    group.finish();
}

fn certify_runs(c: &mut Criterion) {
    let mut group = c.benchmark_group("certify");
    group.sample_size(10);
    for (d, n) in [(2, 4), (2, 6), (3, 3)] {
        let g = random_coloring(d, n, 2, 1).unwrap();
        for ring in [Ring::Mod2, Ring::Integer] {
            let opts = CertifyOptions { ring, ..CertifyOptions::default() };
            group.bench_with_input(BenchmarkId::new(format!("d{d} {ring:?}"), n), &g, |b, g| {
                b.iter(|| certify(black_box(g), &opts).unwrap().max_x_volume)
            });
        }
    }
    group.finish();
}

criterion_group!(benches, partition, certify_runs);
criterion_main!(benches);
