use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ndp_bench::{cap_like, inner_qubo};
use ndp_core::hybrid::{run_hybrid, AnnealSchedule, HybridConfig, InnerLayer};
use ndp_core::qubo::{default_penalties, PenaltyMode};
use ndp_core::solvers::{solve, solve_exact, InnerSettings};
use ndp_core::{run_classical_baseline, Backend, Qubo, SolverParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn dense_qubo(n: usize, seed: u64) -> Qubo {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let terms: Vec<_> = (0..n)
        .flat_map(|p| (p..n).map(move |q| (p, q)))
        .map(|pq| (pq, rng.gen_range(-1.0..1.0)))
        .collect();
    Qubo::from_terms(n, terms, 0.0, vec![])
}

fn heuristics(c: &mut Criterion) {
    let inst = cap_like(8, 20, 1);
    let q = inner_qubo(&inst, PenaltyMode::Strict);
    let mut group = c.benchmark_group("inner_qubo_8x20");
    group.sample_size(10);
    for backend in [Backend::Sa, Backend::Tabu, Backend::Sqa, Backend::Decomposed] {
        let p = SolverParams {
            restarts: 4,
            ..SolverParams::default().with_backend(backend)
        };
        group.bench_with_input(BenchmarkId::from_parameter(format!("{backend:?}")), &p, |b, p| {
            b.iter(|| solve(&q, p).unwrap())
        });
    }
    group.finish();
}

fn exact(c: &mut Criterion) {
    let mut group = c.benchmark_group("exact");
    group.sample_size(10);
    for n in [12, 16, 20] {
        let q = dense_qubo(n, n as u64);
        group.bench_with_input(BenchmarkId::from_parameter(n), &q, |b, q| b.iter(|| solve_exact(q).unwrap()));
    }
    group.finish();
}

fn outer(c: &mut Criterion) {
    let inst = cap_like(6, 12, 2);
    let schedule = AnnealSchedule::standard(6);
    let inner = InnerSettings::new(
        default_penalties(&inst, PenaltyMode::Paper),
        SolverParams {
            restarts: 4,
            ..Default::default()
        },
    );
    let cfg = HybridConfig::new(schedule, InnerLayer::Qubo(inner));
    let mut group = c.benchmark_group("outer_6x12");
    group.sample_size(10);
    group.bench_function("baseline", |b| b.iter(|| run_classical_baseline(&inst, &schedule, 3).unwrap()));
    group.bench_function("hybrid_tabu", |b| b.iter(|| run_hybrid(&inst, &cfg, 3).unwrap()));
    group.finish();
}

criterion_group!(benches, heuristics, exact, outer);
criterion_main!(benches);
