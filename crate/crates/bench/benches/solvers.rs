use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use sigeq::oracle::{grid_search_transmitter, mc_estimate_with_threads};
use sigeq::{solve_nash, solve_stackelberg};
use sigeq_bench::{average_power_mixed, interior_optimum, vector_channel};

fn solvers(c: &mut Criterion) {
    let base = interior_optimum();
    c.bench_function("stackelberg/scalar", |b| b.iter(|| solve_stackelberg(black_box(&base)).unwrap()));
    c.bench_function("nash/scalar", |b| b.iter(|| solve_nash(black_box(&base)).unwrap()));

    let avg = average_power_mixed();
    c.bench_function("nash/average_power", |b| b.iter(|| solve_nash(black_box(&avg)).unwrap()));

    let vec8 = vector_channel(8);
    c.bench_function("stackelberg/vector8", |b| b.iter(|| solve_stackelberg(black_box(&vec8)).unwrap()));
}

fn oracles(c: &mut Criterion) {
    let base = interior_optimum();
    c.bench_function("grid_search/2001", |b| b.iter(|| grid_search_transmitter(black_box(&base), 2001).unwrap()));

    let r = solve_stackelberg(&base).unwrap();
    let mut g = c.benchmark_group("monte_carlo");
    g.sample_size(10);
    g.bench_function("scalar/1e5", |b| {
        b.iter(|| {
            mc_estimate_with_threads(
                &r.signals,
                &r.rule,
                &base.noise,
                (&base.transmitter, &base.receiver),
                100_000,
                1,
                Some(1),
            )
            .unwrap()
        })
    });
    g.finish();
}

criterion_group!(benches, solvers, oracles);
criterion_main!(benches);
