use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use gsco_bench::fixture;
use gsco_core::dmo::{top_g_plus_optimal_visit, top_g_plus_visit, DmoParams};
use gsco_core::rng::{stream_rng, STREAM_DMO};
use gsco_core::{solve, DmoSelection, DmoVariant, SolverConfig};

fn oracles(c: &mut Criterion) {
    let mut group = c.benchmark_group("dmo");
    for &(d, edges, s, g) in &[(256, 1024, 32, 4), (2048, 16_384, 256, 8), (10_312, 333_983, 1623, 20)] {
        let (inst, model) = fixture(d, edges, 32, s, g, 1);
        let graph = model.graph().unwrap().clone();
        let z = inst.objective.gradient(&vec![0.0; d]).unwrap();
        let params = DmoParams::new(s, g);
        group.bench_with_input(BenchmarkId::new("topg", d), &z, |b, z| {
            b.iter(|| top_g_plus_visit(&graph, &params, black_box(z)).unwrap())
        });
        if d <= 2048 {
            group.bench_with_input(BenchmarkId::new("topg_optimal", d), &z, |b, z| {
                let mut rng = stream_rng(0, STREAM_DMO);
                b.iter(|| top_g_plus_optimal_visit(&graph, &params, black_box(z), &mut rng).unwrap())
            });
        }
    }
    group.finish();
}

fn gradient(c: &mut Criterion) {
    let (inst, _) = fixture(10_312, 333_983, 100, 1623, 20, 1);
    let x = vec![1e-3; 10_312];
    c.bench_function("gradient/10312x100", |b| {
        b.iter(|| inst.objective.gradient(black_box(&x)).unwrap())
    });
}

fn solver(c: &mut Criterion) {
    let (inst, model) = fixture(512, 2048, 64, 32, 4, 3);
    let mut cfg = SolverConfig::new(DmoSelection::new(DmoVariant::TopG));
    cfg.max_iters = 100;
    cfg.rel_tol = 0.0;
    c.bench_function("dmo_fw/open_loop/d512x100", |b| {
        b.iter(|| solve(&cfg, &inst.objective, &model, None).unwrap())
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(20);
    targets = oracles, gradient, solver
}
criterion_main!(benches);
