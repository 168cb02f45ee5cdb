use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use qubit_coherence::correlations::{audit_bounds, chsh_max, concurrence, scatter_sample};
use qubit_coherence::states::random_x_state;
use qubit_coherence::tomography::{reconstruct_p2x2, simulate_measurements};
use qubit_coherence::{p2x2, x_state_discord, Noise, RngSeed};
use qubit_coherence_bench::fixture_states;

fn measures(c: &mut Criterion) {
    let states = fixture_states(64);
    c.bench_function("p2x2", |b| {
        b.iter(|| states.iter().map(|r| p2x2(black_box(r))).sum::<f64>())
    });
    c.bench_function("concurrence", |b| {
        b.iter(|| {
            states
                .iter()
                .map(|r| concurrence(black_box(r)))
                .sum::<f64>()
        })
    });
    c.bench_function("chsh_max", |b| {
        b.iter(|| states.iter().map(|r| chsh_max(black_box(r))).sum::<f64>())
    });
    c.bench_function("audit_bounds", |b| {
        b.iter(|| {
            states
                .iter()
                .filter(|r| audit_bounds(black_box(r)).all_satisfied)
                .count()
        })
    });
}

fn discord(c: &mut Criterion) {
    let params: Vec<_> = (0..64)
        .map(|k| random_x_state(&mut RngSeed(1).stream(k)))
        .collect();
    c.bench_function("x_state_discord", |b| {
        b.iter(|| {
            params
                .iter()
                .map(|p| x_state_discord(black_box(p)))
                .sum::<f64>()
        })
    });
}

fn tomography(c: &mut Criterion) {
    let states = fixture_states(16);
    c.bench_function("tomography_exact", |b| {
        b.iter(|| {
            states
                .iter()
                .map(|r| {
                    let set =
                        simulate_measurements(black_box(r), Noise::Exact, RngSeed(0)).unwrap();
                    reconstruct_p2x2(&set)
                })
                .sum::<f64>()
        })
    });
    c.bench_function("tomography_shots_1e6", |b| {
        b.iter(|| simulate_measurements(black_box(&states[0]), Noise::Shots(1_000_000), RngSeed(2)))
    });
}

fn scatter(c: &mut Criterion) {
    let mut group = c.benchmark_group("scatter");
    group.sample_size(10);
    group.bench_function("n=10000", |b| {
        b.iter(|| scatter_sample(black_box(10_000), RngSeed(42)))
    });
    group.finish();
}

criterion_group!(benches, measures, discord, tomography, scatter);
criterion_main!(benches);
