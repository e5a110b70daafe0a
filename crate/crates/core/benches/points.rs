//! Per-point evaluation, sequential against rayon.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use harmonic_contact::catalog::contact::{sasakian, unit_tangent_surface};
use harmonic_contact::chart_geometry::FdConfig;
use harmonic_contact::exec::Execution;
use harmonic_contact::harmonicity::{harmonic_report_with, registry, run_checks};

fn registry_checks(c: &mut Criterion) {
    let fd = FdConfig::default();
    let ids: Vec<&str> = registry().iter().map(|c| c.id).collect();
    let mut group = c.benchmark_group("registry");
    group.sample_size(10);
    for (name, s) in [("unit_tangent_c4", unit_tangent_surface(4.0)), ("sasakian_R5", sasakian(2))] {
        let pts = s.chart().sample_points(20, 42, &fd);
        for exec in [Execution::Sequential, Execution::Parallel] {
            group.bench_with_input(BenchmarkId::new(format!("{exec:?}"), name), &pts, |b, pts| {
                b.iter(|| run_checks(black_box(&ids), &s, pts, &fd, 42, exec).unwrap())
            });
        }
    }
    group.finish();
}

fn harmonic_sections(c: &mut Criterion) {
    let fd = FdConfig::default();
    let s = unit_tangent_surface(-1.0);
    let mut group = c.benchmark_group("harmonic_report");
    group.sample_size(10);
    for count in [8usize, 32] {
        let pts = s.chart().sample_points(count, 7, &fd);
        for exec in [Execution::Sequential, Execution::Parallel] {
            group.bench_with_input(BenchmarkId::new(format!("{exec:?}"), count), &pts, |b, pts| {
                b.iter(|| harmonic_report_with(&s, black_box(pts), &fd, exec).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, registry_checks, harmonic_sections);
criterion_main!(benches);
