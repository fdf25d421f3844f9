use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use fbe_core::{priority_chain, solve_pc, stationary_distribution};

fn solver(c: &mut Criterion) {
    let mut g = c.benchmark_group("solve_pc");
    for (attempts, q) in [(1u32, 2u32), (4, 10), (8, 64)] {
        g.bench_with_input(BenchmarkId::from_parameter(format!("a{attempts}_q{q}")), &(attempts, q), |b, &(a, q)| {
            b.iter(|| solve_pc(black_box(0.95), a, q))
        });
    }
    g.finish();
    c.bench_function("priority_chain_64", |b| b.iter(|| priority_chain(black_box(0.99), 64)));
    c.bench_function("stationary_distribution_k16", |b| {
        b.iter(|| stationary_distribution(black_box(0.99), black_box(0.1), 16))
    });
}

criterion_group!(benches, solver);
criterion_main!(benches);
