use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use gdl_core::fem::{mesh_study, PathOptions};
use gdl_core::oracle::solve_rod_stress;
use gdl_core::{Block, ConstitutiveVariant, MaterialSpec, QuadratureConfig, Rod, Strategy};

const STRATEGIES: [(&str, Strategy); 2] = [
    ("sequential", Strategy::Sequential),
    ("parallel", Strategy::Parallel),
];

fn rod() -> MaterialSpec {
    MaterialSpec::rod_from_groups(0.4, 0.5, 1.0, 1.0, 1.0)
}

fn curves(c: &mut Criterion) {
    let rod = Rod::new(&rod(), ConstitutiveVariant::CASE_I).unwrap();
    let block = Block::new(&MaterialSpec::block_reference(6.0)).unwrap();
    let mut g = c.benchmark_group("curves");
    for (name, s) in STRATEGIES {
        g.bench_with_input(BenchmarkId::new("rod_10001", name), &s, |b, &s| {
            b.iter(|| rod.equilibrium_curve(black_box(10_001), s).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("block_3x2001", name), &s, |b, &s| {
            b.iter(|| block.equilibrium_curve(black_box(2001), s).unwrap())
        });
    }
    g.finish();
}

fn oracle_batch(c: &mut Criterion) {
    let spec = rod();
    let cfg = QuadratureConfig::default();
    let n = 200;
    let mut g = c.benchmark_group("oracle");
    for (name, s) in STRATEGIES {
        g.bench_with_input(BenchmarkId::new("rod_stress_200", name), &s, |b, &s| {
            b.iter(|| {
                s.try_map(n, |i| {
                    let d = (i + 1) as f64 / (n + 1) as f64;
                    solve_rod_stress(&spec, ConstitutiveVariant::CASE_I, d, &cfg)
                })
                .unwrap()
            })
        });
    }
    g.finish();
}

fn meshes(c: &mut Criterion) {
    let spec = rod();
    let opts = PathOptions::default();
    let elements = [50, 100, 200, 400];
    let mut g = c.benchmark_group("mesh_study");
    g.sample_size(10);
    for (name, s) in STRATEGIES {
        g.bench_with_input(BenchmarkId::new("four_meshes", name), &s, |b, &s| {
            b.iter(|| {
                mesh_study(&spec, ConstitutiveVariant::CASE_I, &elements, 20, &opts, s).unwrap()
            })
        });
    }
    g.finish();
}

criterion_group!(benches, curves, oracle_batch, meshes);
criterion_main!(benches);
