use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use miptlab_core::c64;
use miptlab_core::circuit::chain::{build_chain_unitary, ChainSpec};
use miptlab_core::ensemble::{cayley_unitary, sample_gue, sample_unitary, EnsembleParams};
use miptlab_core::measurement::{build_projector, lambda_01, lambda_p};
use miptlab_core::rng::RngSeed;
use miptlab_core::spectral::{trajectory_probability, Rho0};
use miptlab_core::theory::{solve_vpm, TheoryParams};

fn spectra(c: &mut Criterion) {
    let mut g = c.benchmark_group("lambda_p_spectrum");
    g.sample_size(10);
    for dim in [256usize, 512, 1024] {
        let u = sample_unitary(&EnsembleParams::cayley(dim, 2.0), RngSeed::new(1, 0)).unwrap();
        let p = build_projector(dim, dim / 2).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(dim), &dim, |bch, _| {
            bch.iter(|| lambda_p(&u, &p).unwrap().spectrum().unwrap())
        });
    }
    g.finish();
}

fn cayley(c: &mut Criterion) {
    let mut g = c.benchmark_group("cayley_unitary");
    g.sample_size(10);
    for dim in [256usize, 512] {
        let h = sample_gue(&EnsembleParams::cayley(dim, 1.0), RngSeed::new(2, 0)).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(dim), &dim, |bch, _| {
            bch.iter(|| cayley_unitary(&h).unwrap())
        });
    }
    g.finish();
}

fn self_consistent(c: &mut Criterion) {
    let p = TheoryParams::new(0.4, 1.5);
    c.bench_function("solve_vpm", |bch| {
        bch.iter(|| solve_vpm(black_box(c64::new(0.37, 1e-7)), &p).unwrap())
    });
}

fn trajectory(c: &mut Criterion) {
    let dim = 512;
    let u = sample_unitary(&EnsembleParams::cayley(dim, 1.0), RngSeed::new(3, 0)).unwrap();
    let op = lambda_01(&u, &build_projector(dim, dim / 2).unwrap()).unwrap();
    let d: Vec<u64> = (0..40)
        .map(|k| (1.2f64.powi(k)).round() as u64)
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();
    let mut g = c.benchmark_group("trajectory");
    g.sample_size(10);
    g.bench_function("lambda_01_d512", |bch| {
        bch.iter(|| trajectory_probability(&op, &Rho0::MaximallyMixed, &d).unwrap())
    });
    g.finish();
}

fn chain(c: &mut Criterion) {
    let mut g = c.benchmark_group("chain_unitary");
    g.sample_size(10);
    for l in [8usize, 10] {
        let spec = ChainSpec::new(l, l, RngSeed::new(4, 0));
        g.bench_with_input(BenchmarkId::from_parameter(l), &l, |bch, _| {
            bch.iter(|| build_chain_unitary(&spec).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, spectra, cayley, self_consistent, trajectory, chain);
criterion_main!(benches);
