use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use randblaschke::acim::{random_fixed_point, transfer_apply, FixedPointOptions};
use randblaschke::blaschke::{presets, pushforward_identity_residual};
use randblaschke::cocycle::sample_path;
use randblaschke::entropy::{fibre_entropy_orbit, theta_sweep, uniform_theta_grid, OrbitOptions, SweepOptions};
use randblaschke::{BlaschkeProduct, CircleGrid, CircleLift, CocycleConfig, Complex64, DiscPoint, UnitComplex};

fn sample_map(degree: usize) -> BlaschkeProduct {
    let zeros: Vec<Complex64> = (0..degree).map(|k| Complex64::from_polar(0.6, 2.0 * k as f64 + 0.3)).collect();
    BlaschkeProduct::from_parts(0.1, &zeros).unwrap()
}

fn maps(c: &mut Criterion) {
    let mut g = c.benchmark_group("map");
    for degree in [2, 8, 32] {
        let t = sample_map(degree);
        let lift = CircleLift::new(&t);
        let z = UnitComplex::from_turns(0.37);
        g.bench_with_input(BenchmarkId::new("apply", degree), &t, |b, t| b.iter(|| t.apply(black_box(z.value()))));
        g.bench_with_input(BenchmarkId::new("preimages", degree), &lift, |b, l| {
            b.iter(|| l.preimages(black_box(z)).unwrap())
        });
    }
    g.finish();
}

fn operators(c: &mut Criterion) {
    let t = presets::boundary_attractor();
    let x = DiscPoint::new(Complex64::new(0.3, -0.5)).unwrap();
    c.bench_function("pushforward_residual_2048", |b| {
        b.iter(|| pushforward_identity_residual(&t, black_box(x), 6, 2048).unwrap())
    });
    let grid = CircleGrid::new(1024).unwrap();
    let f = grid.sample(|z| 1.0 + 0.3 * z.value().re);
    c.bench_function("transfer_apply_1024", |b| b.iter(|| transfer_apply(&t, black_box(&f)).unwrap()));
}

fn cocycle(c: &mut Criterion) {
    let cfg = CocycleConfig::mixed_bernoulli(0.2).unwrap();
    let table = cfg.table().unwrap();
    let opts = FixedPointOptions::default();
    let path = sample_path(&cfg.driving, &table, 1, opts.max_n, 11_000, UnitComplex::ONE).unwrap();
    c.bench_function("random_fixed_point", |b| b.iter(|| random_fixed_point(black_box(&path), &opts).unwrap()));
    c.bench_function("orbit_entropy_1e4", |b| {
        b.iter(|| fibre_entropy_orbit(black_box(&path), 10_000, &OrbitOptions::default()).unwrap())
    });
    let mut g = c.benchmark_group("sweep");
    g.sample_size(10);
    g.bench_function("theta_sweep_128x1e4", |b| {
        b.iter(|| theta_sweep(&cfg.driving, &table, &uniform_theta_grid(128), &SweepOptions::orbit(10_000, 1)).unwrap())
    });
    g.finish();
}

criterion_group!(benches, maps, operators, cocycle);
criterion_main!(benches);
