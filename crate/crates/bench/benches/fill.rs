use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use cubecolor_core::chains::{fill, random_relative_cycle, Ring};

fn filling(c: &mut Criterion) {
    let mut group = c.benchmark_group("fill");
    for (d, k) in [(2, 1), (3, 1), (3, 2), (4, 2), (4, 3)] {
        let cycles: Vec<_> = (0..16).map(|s| random_relative_cycle(s, d, k, 4, Ring::Integer)).collect();
        group.bench_with_input(BenchmarkId::new(format!("d{d}"), k), &cycles, |b, cycles| {
            b.iter(|| {
                for z in cycles {
                    black_box(fill(z).unwrap());
                }
            })
        });
    }
    group.finish();
}

fn boundary(c: &mut Criterion) {
    let z = random_relative_cycle(11, 4, 2, 8, Ring::Integer);
    let h = fill(&z).unwrap();
    c.bench_function("relative boundary d4 k3", |b| b.iter(|| black_box(&h).boundary(true).unwrap()));
}

criterion_group!(benches, filling, boundary);
criterion_main!(benches);
