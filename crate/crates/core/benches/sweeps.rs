use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use ypq_core::chart::{sample_points, validate_params, ChartPoint};
use ypq_core::forms::{cky_residual, NamedFormCatalog};
use ypq_core::geometry::{einstein_residual, MetricProvider};
use ypq_core::integrability::{integrate_geodesic, IntegratorConfig, InvariantSystem};
use ypq_core::par::{self, Execution};

fn sweeps(c: &mut Criterion) {
    let params = validate_params(0.5, 1.0).unwrap();
    let provider = MetricProvider::ypq(params).unwrap();
    let catalog = NamedFormCatalog::new(params).unwrap();
    let points: Vec<ChartPoint> = sample_points(&provider.domain, 1, 100);
    let system = InvariantSystem::ypq(params).unwrap();
    let states = system.sample_states(2, 8).unwrap();
    let cfg = IntegratorConfig::default();

    let mut group = c.benchmark_group("sweep");
    group.sample_size(10);
    for exec in [Execution::Sequential, Execution::Parallel] {
        let name = format!("{exec:?}");
        group.bench_with_input(BenchmarkId::new("einstein_100", &name), &exec, |b, &exec| {
            b.iter(|| par::max_of(exec, &points, |p| einstein_residual(&provider, &p.as_array())).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("cky_psi_100", &name), &exec, |b, &exec| {
            b.iter(|| par::max_of(exec, &points, |p| cky_residual(&provider, &catalog.psi, &p.as_array())).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("geodesics_8x10", &name), &exec, |b, &exec| {
            b.iter(|| par::map(exec, &states, |s| integrate_geodesic(&system.flow, s, 10.0, &cfg).unwrap().states.len()))
        });
    }
    group.finish();
}

criterion_group!(benches, sweeps);
criterion_main!(benches);
