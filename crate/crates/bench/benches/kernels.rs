use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use num_complex::Complex64 as C64;
use omegachan::channels::apply_stinespring;
use omegachan::contraction::{tau_lower_bound, HusimiEvaluator};
use omegachan::fock::displacement_elements;
use omegachan::nonclassicality::{classicality_test, noisy_attenuator_char_fn, ClassicalityGrid};
use omegachan::{build_omega, ChannelSpec, CharFn, DensityOperator, Environment, FockVector};
use std::f64::consts::FRAC_PI_4;
use std::hint::black_box;

fn superposition(c: &mut Criterion) {
    let mut g = c.benchmark_group("build_omega");
    for e in [1.0, 5.0, 10.0] {
        g.bench_with_input(BenchmarkId::from_parameter(e), &e, |b, &e| b.iter(|| build_omega(black_box(e), None).unwrap()));
    }
    g.finish();
}

fn displacement(c: &mut Criterion) {
    let mut g = c.benchmark_group("displacement_elements");
    for n in [32, 128, 512] {
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| displacement_elements(black_box(C64::new(1.5, -0.7)), n, n))
        });
    }
    g.finish();
}

fn stinespring(c: &mut Criterion) {
    let env = Environment::omega(1.0).unwrap();
    let rho = DensityOperator::from_pure(&build_omega(2.0, None).unwrap().fock);
    let mut g = c.benchmark_group("apply_stinespring");
    g.sample_size(20);
    g.bench_function("attenuator", |b| {
        let spec = ChannelSpec::attenuator(FRAC_PI_4, env.clone());
        b.iter(|| apply_stinespring(&spec, black_box(&rho)).unwrap())
    });
    g.bench_function("amplifier", |b| {
        let spec = ChannelSpec::amplifier(0.3, env.clone());
        b.iter(|| apply_stinespring(&spec, black_box(&rho)).unwrap())
    });
    g.finish();
}

fn husimi(c: &mut Criterion) {
    let rho = DensityOperator::from_pure(&build_omega(5.0, None).unwrap().fock);
    let h = HusimiEvaluator::new(&rho);
    c.bench_function("husimi_point", |b| b.iter(|| h.q(black_box(C64::new(1.2, 0.4)))));
    let mut g = c.benchmark_group("tau_lower_bound");
    g.sample_size(10);
    let spec = ChannelSpec::attenuator(FRAC_PI_4, Environment::omega(1.0).unwrap());
    g.bench_function("e1_quarter_pi", |b| b.iter(|| tau_lower_bound(black_box(1.0), &spec).unwrap()));
    g.finish();
}

fn classicality(c: &mut Criterion) {
    let om = build_omega(1.0, None).unwrap();
    let chi = noisy_attenuator_char_fn(&om, FRAC_PI_4, 0.3, CharFn::vacuum()).unwrap();
    let mut g = c.benchmark_group("classicality_test");
    g.sample_size(10);
    g.bench_function("default_grid", |b| b.iter(|| classicality_test(black_box(&chi), &ClassicalityGrid::default())));
    let coh = CharFn::Density(DensityOperator::from_pure(&FockVector::vacuum(4)));
    g.bench_function("density_input", |b| b.iter(|| classicality_test(black_box(&coh), &ClassicalityGrid::default())));
    g.finish();
}

criterion_group!(benches, superposition, displacement, stinespring, husimi, classicality);
criterion_main!(benches);
