use std::hint::black_box;

use convex_order::gauss::solve_pair;
use convex_order::{bw2, project_1d, solve_wot, GaussOptions, Solver, WotConfig};
use convex_order_bench::{commuting_pair, generic_pair, measure, measure_1d, rng};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn gaussian(c: &mut Criterion) {
    let mut group = c.benchmark_group("gaussian");
    for d in [2, 4, 8] {
        let (a, b) = generic_pair(&mut rng(d as u64), d);
        group.bench_with_input(BenchmarkId::new("bw2", d), &d, |bench, _| {
            bench.iter(|| bw2(black_box(&a), black_box(&b)).unwrap())
        });

        let (mu, nu) = commuting_pair(&mut rng(100 + d as u64), d);
        let auto = GaussOptions::default();
        group.bench_with_input(BenchmarkId::new("commuting", d), &d, |bench, _| {
            bench.iter(|| solve_pair(black_box(&mu), black_box(&nu), &auto).unwrap())
        });

        let pgd = GaussOptions::with_solver(Solver::Pgd);
        group.bench_with_input(BenchmarkId::new("pgd", d), &d, |bench, _| {
            bench.iter(|| solve_pair(black_box(&a), black_box(&b), &pgd).unwrap())
        });
    }
    group.finish();
}

fn one_dim(c: &mut Criterion) {
    let mut group = c.benchmark_group("project_1d");
    for n in [10, 100, 1000] {
        let mut r = rng(n as u64);
        let (mu, nu) = (measure_1d(&mut r, n), measure_1d(&mut r, n));
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |bench, _| {
            bench.iter(|| project_1d(black_box(&mu), black_box(&nu)).unwrap())
        });
    }
    group.finish();
}

fn weak_transport(c: &mut Criterion) {
    let mut group = c.benchmark_group("solve_wot");
    group.sample_size(10);
    let cfg = WotConfig::default();
    for n in [8, 16, 32] {
        let mut r = rng(n as u64);
        let (mu, nu) = (measure(&mut r, n, 2), measure(&mut r, n, 2));
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |bench, _| {
            bench.iter(|| solve_wot(black_box(&mu), black_box(&nu), &cfg).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, gaussian, one_dim, weak_transport);
criterion_main!(benches);
