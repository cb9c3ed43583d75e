use std::f64::consts::PI;
use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use sublin_core::oracle::{integrate, residual, time_to_zero, IntegrateOptions, StopRule};
use sublin_core::profiles::{classical, layout, multibump};
use sublin_core::regularized::solve_on_grid;
use sublin_core::symbolic::{build, SymbolWindow};
use sublin_core::timemap::{invert_c, scaled_time, time_map, DEFAULT_TOL};
use sublin_core::Params;

fn params() -> Params {
    Params::new(4.0, 1.0, 0.5, PI).unwrap()
}

fn quadrature(c: &mut Criterion) {
    let mut g = c.benchmark_group("scaled_time");
    for eta in [1e-8, 1e-2, 0.5, 1.0 - 1e-8] {
        g.bench_with_input(BenchmarkId::from_parameter(eta), &eta, |b, &eta| {
            b.iter(|| scaled_time(black_box(eta), 0.5, DEFAULT_TOL).unwrap())
        });
    }
    g.finish();
}

fn time_map_and_inverse(c: &mut Criterion) {
    let p = params();
    let u_h = p.equilibria().u_h;
    c.bench_function("time_map", |b| {
        b.iter(|| time_map(black_box(2.0 * u_h), &p).unwrap())
    });
    let mut g = c.benchmark_group("invert_c");
    for lam in [1.001, 4.0, 15.99] {
        g.bench_with_input(BenchmarkId::from_parameter(lam), &lam, |b, &lam| {
            b.iter(|| invert_c(black_box(lam), &p).unwrap())
        });
    }
    g.finish();
}

fn profiles(c: &mut Criterion) {
    let p = params();
    let mut g = c.benchmark_group("classical_profile");
    g.sample_size(20);
    for n in [257, 1025, 4097] {
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| classical(4.0, &p, n).unwrap())
        });
    }
    g.finish();

    let wide = Params::new(1.0, 2.0, 0.5, 8.0 * PI).unwrap();
    let lay = layout(&[2.0 * PI, 6.0 * PI], 1.0, &wide).unwrap();
    c.bench_function("multibump_4097", |b| {
        b.iter(|| multibump(&lay, &wide, 4097).unwrap())
    });

    let critical = p.with_lambda(p.equilibria().big_sigma(1)).unwrap();
    let window = SymbolWindow::new(1, (0..64).map(|i| [1, 0, -1][i % 3]).collect()).unwrap();
    c.bench_function("chaos_build_64", |b| {
        b.iter(|| build(&window, &critical).unwrap())
    });
}

fn ivp(c: &mut Criterion) {
    let p = params();
    let u_h = p.equilibria().u_h;
    let mut g = c.benchmark_group("ivp");
    g.bench_function("time_to_zero", |b| {
        b.iter(|| time_to_zero(black_box(2.0 * u_h), &p).unwrap())
    });
    g.bench_function("periodic_orbit", |b| {
        let u0 = 0.5 * (p.equilibria().u0_plus + u_h);
        b.iter(|| integrate(black_box(u0), 0.0, &p, 20.0, IntegrateOptions::new(1e-11)).unwrap())
    });
    g.bench_function("first_zero", |b| {
        let opts = IntegrateOptions::new(1e-11).stop(StopRule::FirstZeroU);
        b.iter(|| integrate(black_box(3.0 * u_h), 0.0, &p, PI, opts).unwrap())
    });
    g.finish();
}

fn verification(c: &mut Criterion) {
    let p = params();
    let prof = classical(4.0, &p, 4097).unwrap();
    c.bench_function("residual_4097", |b| {
        b.iter(|| residual(black_box(&prof), 3).unwrap())
    });
    let mut g = c.benchmark_group("regularized");
    g.sample_size(10);
    let base = Params::new(1.0, 1.0, 0.5, PI).unwrap();
    g.bench_function("solve_1025", |b| {
        b.iter(|| solve_on_grid(black_box(4.0), 1e-2, &base, 1025).unwrap())
    });
    g.finish();
}

criterion_group!(
    benches,
    quadrature,
    time_map_and_inverse,
    profiles,
    ivp,
    verification
);
criterion_main!(benches);
