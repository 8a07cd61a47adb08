use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use finite_gauss::interval_map::{square_orbit_exact, step_f, unit_rational};
use finite_gauss::measure::transfer_operator_residual;
use finite_gauss::periodic::enumerate_periodic;
use finite_gauss::sphere3d::simulate_histogram;
use finite_gauss::{PolygonConfig, SimulationParams, TetraConfig};

fn interval(c: &mut Criterion) {
    let cfg = PolygonConfig::new(5).unwrap();
    let ts: Vec<f64> = (0..1000).map(|i| cfg.t_star() * (2.0 * i as f64 / 999.0 - 1.0)).collect();
    c.bench_function("step_f n=5 x1000", |b| {
        b.iter(|| ts.iter().map(|&t| step_f(black_box(t), &cfg).map_or(0, |(_, k)| k)).sum::<usize>())
    });
    c.bench_function("transfer residual n=5 x1000", |b| {
        b.iter(|| {
            ts.iter()
                .filter_map(|&t| transfer_operator_residual(black_box(t), &cfg).ok())
                .fold(0.0, f64::max)
        })
    });
    let start = unit_rational(3, 7);
    c.bench_function("exact square orbit 30 steps", |b| {
        b.iter(|| square_orbit_exact(black_box(&start), 30).unwrap())
    });
    let cfg4 = PolygonConfig::new(4).unwrap();
    c.bench_function("periodic table n=4 len<=4", |b| {
        b.iter(|| enumerate_periodic(black_box(4), &cfg4).unwrap())
    });
}

fn sphere(c: &mut Criterion) {
    let cfg = TetraConfig::default();
    let params = SimulationParams {
        iterations: 100_000,
        ..SimulationParams::default()
    };
    let mut group = c.benchmark_group("sphere");
    group.sample_size(10);
    group.bench_function("histogram 1e5", |b| {
        b.iter(|| simulate_histogram(black_box(&params), &cfg).unwrap())
    });
    group.finish();
}

criterion_group!(benches, interval, sphere);
criterion_main!(benches);
